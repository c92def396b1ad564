"""
Utility functions for file operations and data serialization

Main features:
- Creating output directories
- Atomic text and CSV writes (no half-written outputs after a failure)
- Streaming CSV reads with header validation and row numbers
- Reading and writing JSON data with orjson
"""

import csv
import io
from pathlib import Path
from typing import Any, Iterable, Iterator, List, Sequence, Tuple, Union

import orjson
from atomicwrites import atomic_write

from ..errors import InputError


def ensure_directory(directory: Union[str, Path]) -> Path:
    """
    Ensure that a directory exists, creating it if necessary.

    Args:
        directory: Path to the directory

    Returns:
        Path: Path to the directory
    """
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_text_atomic(file_path: Union[str, Path], text: str) -> str:
    """
    Write text to a file using atomic write for safer file operations.

    Args:
        file_path: Destination path
        text: Content to write (UTF-8)

    Returns:
        str: Absolute path of the written file
    """
    file_path = Path(file_path)
    file_path.parent.mkdir(parents=True, exist_ok=True)

    # newline='' keeps "\n" line endings on every platform
    with atomic_write(file_path, mode='w', overwrite=True, encoding='utf-8', newline='') as f:
        f.write(text)

    return str(file_path.absolute())


def format_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """CSV text with "\\n" line endings, header first"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()


def write_csv(file_path: Union[str, Path], header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """
    Write a CSV file atomically with "\\n" line endings.

    Args:
        file_path: Destination path
        header: Column names
        rows: Row values, already formatted or convertible with str()

    Returns:
        str: Absolute path of the written file
    """
    return write_text_atomic(file_path, format_csv(header, rows))


def read_csv_rows(file_path: Union[str, Path], expected_header: Sequence[str]) -> Iterator[Tuple[int, List[str]]]:
    """
    Stream the rows of a CSV file after checking its header.

    Args:
        file_path: Path to the CSV file
        expected_header: Exact column names the first line must contain

    Yields:
        Tuple[int, List[str]]: (1-based data row number, stripped cell values)

    Raises:
        InputError: If the file is missing or not valid UTF-8, the header
            differs or a row has the wrong number of cells
    """
    file_path = Path(file_path)
    if not file_path.is_file():
        raise InputError(f"Input file not found: {file_path}")

    row_number = 0
    with open(file_path, 'r', encoding='utf-8', newline='') as f:
        reader = csv.reader(f)
        try:
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != list(expected_header):
                raise InputError(
                    f"{file_path.name}: expected header {','.join(expected_header)}, got {header}"
                )

            for row_number, row in enumerate(reader, start=1):
                if not row:
                    continue
                if len(row) != len(expected_header):
                    raise InputError(
                        f"{file_path.name}: malformed row {row_number}: "
                        f"expected {len(expected_header)} fields, got {len(row)}"
                    )
                yield row_number, [cell.strip() for cell in row]
        except UnicodeDecodeError as e:
            raise InputError(f"{file_path.name}: invalid UTF-8 near data row {row_number + 1}: {e}") from e


def save_json(file_path: Union[str, Path], data: Any) -> str:
    """
    Save JSON data to a file using orjson, with sorted keys so equal data
    always produces equal bytes.

    Args:
        file_path: Path to the file to save
        data: JSON data to save (dict or list)

    Returns:
        str: Absolute path of the saved file
    """
    file_path = Path(file_path)
    file_path.parent.mkdir(parents=True, exist_ok=True)

    options = orjson.OPT_NON_STR_KEYS | orjson.OPT_SERIALIZE_NUMPY | orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS
    json_bytes = orjson.dumps(data, option=options) + b"\n"

    with atomic_write(file_path, mode='wb', overwrite=True) as f:
        f.write(json_bytes)

    return str(file_path.absolute())


def load_json(file_path: Union[str, Path]) -> Any:
    """
    Load data from a JSON file using orjson.

    Args:
        file_path: Path to the JSON file to load

    Returns:
        dict or list: Loaded JSON data, None if the file does not exist

    Raises:
        InputError: If the file is not valid JSON
    """
    file_path = Path(file_path)

    if not file_path.exists():
        return None

    try:
        return orjson.loads(file_path.read_bytes())
    except orjson.JSONDecodeError as e:
        raise InputError(f"{file_path.name}: invalid JSON: {e}") from e
