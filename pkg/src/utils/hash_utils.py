#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Hash utilities for run reproducibility and keyed noise derivation.

- xxh3_64 config hashes and source-tree hashes (fast, stable across platforms)
- blake3 digests of output files
- xxh3_128 keyed slots that turn (seed, label) into independent integers
"""

import logging
from pathlib import Path
from typing import Any, Dict, Optional, Set, Tuple, Union

import blake3
import orjson
import xxhash
from tqdm import tqdm

# Logger configuration
logger = logging.getLogger("TrendsHash")

# Digests selectable for config and source-tree hashes
HASH_ALGORITHMS = {
    'xxh3_64': xxhash.xxh3_64,
    'blake3': blake3.blake3,
}

_UINT52_SHIFT = 128 - 52


def calculate_config_hash(config_data: Dict[str, Any], algorithm: str = 'xxh3_64') -> str:
    """
    Hash a JSON-compatible configuration canonically (sorted keys).

    Args:
        config_data: Configuration as plain JSON data
        algorithm: Hash algorithm name from HASH_ALGORITHMS

    Returns:
        str: Hexadecimal digest
    """
    hash_obj = HASH_ALGORITHMS.get(algorithm, HASH_ALGORITHMS['xxh3_64'])()
    hash_obj.update(orjson.dumps(config_data, option=orjson.OPT_SORT_KEYS | orjson.OPT_NON_STR_KEYS))
    return hash_obj.hexdigest()


def generate_file_hash(file_path: Union[str, Path]) -> str:
    """
    Generate a blake3 digest of a file

    Args:
        file_path: Path to the file

    Returns:
        str: Hex digest, empty string if the file cannot be read
    """
    file_path = Path(file_path)
    if not file_path.is_file():
        logger.error(f"File not found: {file_path}")
        return ""

    return blake3.blake3(file_path.read_bytes()).hexdigest()


def calculate_src_directory_hash(
    src_path: Optional[Union[str, Path]] = None,
    algorithm: str = 'xxh3_64',
    exclude_dirs: Optional[Set[str]] = None,
    show_progress: bool = False
) -> Tuple[str, Dict[str, str]]:
    """
    Calculates the hash of all Python files in the src directory and combines
    them into a single value. Recorded in run metadata so outputs can be tied
    to the exact code that produced them.

    Args:
        src_path: Path to src directory (automatically detected if not specified)
        algorithm: Hash algorithm to use
        exclude_dirs: Set of directory names to exclude
        show_progress: Whether to show a progress bar

    Returns:
        Tuple[str, Dict[str, str]]:
            - Combined hash value of all files
            - Dictionary of relative file paths and their hash values
    """
    if exclude_dirs is None:
        exclude_dirs = {'__pycache__', '.git'}

    src_path = Path(src_path) if src_path is not None else Path(__file__).parent.parent

    target_files = sorted(
        path for path in src_path.rglob("*.py")
        if not any(p.name in exclude_dirs for p in path.parents)
    )

    file_iterator = tqdm(target_files, desc="Hashing files") if show_progress else target_files

    file_hashes = {}
    for file_path in file_iterator:
        hash_obj = HASH_ALGORITHMS[algorithm]()
        # Normalize line endings so the hash is platform-independent
        hash_obj.update(file_path.read_bytes().replace(b"\r\n", b"\n"))
        file_hashes[file_path.relative_to(src_path).as_posix()] = hash_obj.hexdigest()

    final_hash_obj = HASH_ALGORITHMS[algorithm]()
    final_hash_obj.update(''.join(file_hashes[p] for p in sorted(file_hashes)).encode('utf-8'))
    return final_hash_obj.hexdigest(), file_hashes


def keyed_uint52(master_seed: int, *parts: Any) -> int:
    """
    Derive a 52-bit integer from a master seed and a label.

    The same (seed, parts) always gives the same value, independent of the
    order in which labels are evaluated.

    Args:
        master_seed: 64-bit master seed
        parts: Label components, joined with "|"

    Returns:
        int: Value in [0, 2**52)
    """
    label = "|".join(str(p) for p in (master_seed,) + parts)
    return xxhash.xxh3_128_intdigest(label.encode('utf-8')) >> _UINT52_SHIFT


def keyed_seed(master_seed: int, *parts: Any) -> int:
    """
    Derive a 64-bit generator seed from a master seed and a label.

    Args:
        master_seed: 64-bit master seed
        parts: Label components

    Returns:
        int: Seed in [0, 2**64)
    """
    label = "|".join(str(p) for p in (master_seed, "block") + parts)
    return xxhash.xxh3_64_intdigest(label.encode('utf-8'))
