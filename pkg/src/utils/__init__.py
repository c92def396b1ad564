"""
Common utility modules for the symptom-trends project

This module includes the following common utility functions:
- File operations (atomic text, CSV and JSON writes)
- Hash calculation (config hashes, output digests, keyed noise slots)
- Calendar helpers (UTC days and Monday-aligned weeks)
"""

from .file_utils import (
    ensure_directory,
    write_text_atomic,
    format_csv,
    write_csv,
    read_csv_rows,
    save_json,
    load_json
)

from .hash_utils import (
    calculate_config_hash,
    generate_file_hash,
    calculate_src_directory_hash,
    keyed_uint52,
    keyed_seed
)

from .date_utils import (
    parse_day,
    week_start,
    day_range,
    week_range,
    in_range
)

__all__ = [
    'ensure_directory',
    'write_text_atomic',
    'format_csv',
    'write_csv',
    'read_csv_rows',
    'save_json',
    'load_json',
    'calculate_config_hash',
    'generate_file_hash',
    'calculate_src_directory_hash',
    'keyed_uint52',
    'keyed_seed',
    'parse_day',
    'week_start',
    'day_range',
    'week_range',
    'in_range'
]
