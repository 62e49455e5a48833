# walkpool/utils/keyvalue.py
from pathlib import Path
from typing import Dict, Mapping, Union

from ..core.errors import LoadError, ParseError


def read_key_values(path: Union[str, Path]) -> Dict[str, str]:
    """Flat ``key=value`` file; '#' comments and blank lines are ignored"""
    path = Path(path)
    if not path.is_file():
        raise LoadError(f"file not found: {path}")
    out: Dict[str, str] = {}
    with path.open("r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError(path, line_no, f"expected key=value, got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if not key:
                raise ParseError(path, line_no, "empty key")
            if key in out:
                raise ParseError(path, line_no, f"duplicate key {key!r}")
            out[key] = value
    return out


def write_key_values(path: Union[str, Path], values: Mapping[str, object]) -> None:
    lines = [f"{key}={values[key]}" for key in sorted(values)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
