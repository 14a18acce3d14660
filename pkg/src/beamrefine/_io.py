"""Deterministic file output helpers.

Every artifact file is written through these so that reruns with the same
inputs are byte-identical: JSON keys are sorted, floats use repr round-trip
formatting, and writes go through a temp file + rename.
"""

import json
import os
import tempfile


def dumps_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_text_atomic(path, text: str) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_json_atomic(path, obj) -> None:
    write_text_atomic(path, dumps_json(obj))
