import json
import logging
import math
import os
import re
import tempfile
from pathlib import Path

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"

# Finite floats travel through json.dumps as marked strings and are unquoted afterwards.
FLOAT_MARK = "\x00"
MARKED_FLOAT = re.compile(r'"\\u0000([^"\\]+)\\u0000"')


def _to_builtin(value):
    if isinstance(value, np.generic):
        return value.item()

    if isinstance(value, np.ndarray):
        return value.tolist()

    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}

    raise TypeError("Object of type {} is not JSON serializable".format(type(value).__name__))


def _mark_floats(value):
    if isinstance(value, (np.generic, np.ndarray, complex)):
        value = _to_builtin(value)

    if isinstance(value, dict):
        return {key: _mark_floats(item) for key, item in value.items()}

    if isinstance(value, (list, tuple)):
        return [_mark_floats(item) for item in value]

    if isinstance(value, float) and math.isfinite(value):
        return FLOAT_MARK + FLOAT_FORMAT % value + FLOAT_MARK

    return value


def csv_bytes(frame: pd.DataFrame) -> bytes:
    """Header row, comma separator, ``\\n`` line endings and 17 significant digits."""

    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n").encode("utf-8")


def json_bytes(data: dict) -> bytes:
    """Sorted keys, two-space indent and 17 significant digits."""

    text = json.dumps(_mark_floats(data), sort_keys=True, indent=2, ensure_ascii=False, default=_to_builtin)

    return (MARKED_FLOAT.sub(r"\1", text) + "\n").encode("utf-8")


def write_atomic(path: Path, content: bytes) -> Path:
    """Write into a temporary file next to ``path`` and rename it over ``path``."""

    path = Path(path)
    handle, temporary = tempfile.mkstemp(dir=path.parent, prefix=".{}.".format(path.name), suffix=".tmp")

    try:
        with os.fdopen(handle, "wb") as file:
            file.write(content)
        os.replace(temporary, path)

    except BaseException:
        Path(temporary).unlink(missing_ok=True)
        raise

    logger.info("Wrote %s (%d bytes)", path, len(content))

    return path


def write_artifact(directory: Path, name: str, artifact: pd.DataFrame | dict) -> Path:
    """Write a table as CSV or a mapping as JSON under ``directory``."""

    content = csv_bytes(artifact) if isinstance(artifact, pd.DataFrame) else json_bytes(artifact)

    return write_atomic(Path(directory) / name, content)


def prepare_output_dir(directory: Path, force: bool = False) -> Path:
    """
    Create the run directory.

    :raises FileExistsError: When the directory already holds files and ``force`` is not set.
    """

    directory = Path(directory)

    if directory.exists() and any(directory.iterdir()) and not force:
        raise FileExistsError("{} is not empty; pass --force to overwrite it.".format(directory))

    directory.mkdir(parents=True, exist_ok=True)

    return directory
