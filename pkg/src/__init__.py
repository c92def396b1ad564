#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Main package of the symptom-trends-core library

This file contains code that is executed first
when the symptom-trends-core library is imported.
"""

import sys

# Disable generation of __pycache__ folders and bytecode files (.pyc)
# so the source hash recorded in run metadata stays stable
sys.dont_write_bytecode = True
