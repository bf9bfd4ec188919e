"""
Various tools and utils shared by the experiment pipeline:
seeding, hashing and CSV output.
"""
import csv
import hashlib
import json
import os
from typing import Iterable, Optional, Sequence

import numpy as np

from sparse_representation_control import __version__


def derive_seed(master_seed: int, tag: str, index: int = 0) -> int:
    """Child seed = hash(master seed, purpose tag, index).

    Decouples the randomness of data generation, initialization and control
    so that changing one phase never shifts the streams of another."""
    digest = hashlib.sha256(f"{int(master_seed)}:{tag}:{int(index)}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def make_rng(master_seed: int, tag: str, index: int = 0) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master_seed, tag, index))


def canonical_json(value) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"), default=_to_builtin)


def _to_builtin(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if hasattr(value, "value"):
        # Enum members
        return value.value
    raise TypeError(f"Object of type {type(value).__name__} is not serializable.")


def config_hash(config_dict: dict) -> str:
    return hashlib.sha256(canonical_json(config_dict).encode()).hexdigest()[:16]


def array_fingerprint(arrays: Iterable[np.ndarray]) -> str:
    """Hash of the exact bytes of a sequence of arrays."""
    hasher = hashlib.sha256()
    for arr in arrays:
        arr = np.ascontiguousarray(arr)
        hasher.update(str(arr.dtype).encode())
        hasher.update(str(arr.shape).encode())
        hasher.update(arr.tobytes())
    return hasher.hexdigest()


def file_fingerprint(file_name: str) -> str:
    hasher = hashlib.sha256()
    with open(file_name, "rb") as ff:
        for chunk in iter(lambda: ff.read(1 << 16), b""):
            hasher.update(chunk)
    return hasher.hexdigest()


def write_csv(
    file_name: str,
    header: Sequence[str],
    rows: Iterable[Sequence],
    hash_value: Optional[str] = None,
) -> str:
    """Writes rows with a leading comment line naming config hash and version."""
    directory = os.path.dirname(file_name)
    if directory:
        os.makedirs(directory, exist_ok=True)

    with open(file_name, "w", newline="") as ff:
        ff.write(f"# config_hash={hash_value or 'none'} version={__version__}\n")
        writer = csv.writer(ff, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_cell(cell) for cell in row])
    return file_name


def read_csv(file_name: str) -> list[dict]:
    """Reads a file written by `write_csv` into a list of row-dicts (strings)."""
    with open(file_name, "r", newline="") as ff:
        lines = [line for line in ff if not line.startswith("#")]
    return list(csv.DictReader(lines))


def _format_cell(cell):
    if isinstance(cell, (float, np.floating)):
        return repr(float(cell))
    if isinstance(cell, (bool, np.bool_)):
        return int(cell)
    if isinstance(cell, np.integer):
        return int(cell)
    return cell


def write_record_stream(
    file_name: str, magic: str, version: int, header: dict, arrays: Sequence[np.ndarray]
) -> str:
    """Versioned binary file: magic line, json header line, then `.npy` records.

    The bytes only depend on the content (no timestamps), so identical inputs
    give identical files."""
    directory = os.path.dirname(file_name)
    if directory:
        os.makedirs(directory, exist_ok=True)

    header = dict(header, n_arrays=len(arrays))
    with open(file_name, "wb") as ff:
        ff.write(f"{magic} {version}\n".encode())
        ff.write((canonical_json(header) + "\n").encode())
        for arr in arrays:
            np.save(ff, np.ascontiguousarray(arr), allow_pickle=False)
    return file_name


def read_record_stream(file_name: str, magic: str, version: int) -> tuple[dict, list]:
    with open(file_name, "rb") as ff:
        first_line = ff.readline().decode().split()
        if len(first_line) != 2 or first_line[0] != magic:
            raise ValueError(f"File <<{file_name}>> is not a {magic} file.")
        if int(first_line[1]) != version:
            raise ValueError(
                f"File <<{file_name}>> has version {first_line[1]}, expected {version}."
            )
        header = json.loads(ff.readline().decode())
        arrays = [np.load(ff, allow_pickle=False) for _ in range(header["n_arrays"])]
    return header, arrays
