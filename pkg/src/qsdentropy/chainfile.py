"""Chain definition files.

A chain file is a JSON object with exactly these fields::

    {
      "transient": ["1", "2"],
      "absorbing": ["∂"],
      "rows": {"1": {"2": 0.5, "∂": 0.5}, "2": {"1": 0.5, "∂": 0.5}}
    }

Labels are strings.  ``rows`` maps each transient label to its outgoing
probabilities as decimal numbers; missing entries are 0 and absorbing rows
are implied.  Unknown fields are rejected.
"""

import json
import math

from .chain import validate
from .errors import ChainFileError

FIELDS = ("transient", "absorbing", "rows")


def _labels(obj, name):
    if not isinstance(obj, list) or not all(isinstance(x, str) for x in obj):
        raise ChainFileError(f'"{name}" must be a list of strings')
    return obj


def parse_chain_text(text):
    """Parse chain-file text into the raw mapping accepted by :func:`validate`.

    Raises
    ------
    ChainFileError
        On malformed JSON or a document not matching the grammar.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ChainFileError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ChainFileError("top level must be an object")
    unknown = sorted(set(doc) - set(FIELDS))
    if unknown:
        raise ChainFileError(f"unknown fields: {', '.join(unknown)}")
    missing = [f for f in FIELDS if f not in doc]
    if missing:
        raise ChainFileError(f"missing fields: {', '.join(missing)}")
    _labels(doc["transient"], "transient")
    _labels(doc["absorbing"], "absorbing")
    rows = doc["rows"]
    if not isinstance(rows, dict):
        raise ChainFileError('"rows" must be an object')
    for src, row in rows.items():
        if not isinstance(row, dict):
            raise ChainFileError(f"row {src!r} must be an object")
        for dst, p in row.items():
            if isinstance(p, bool) or not isinstance(p, (int, float)) or not math.isfinite(p):
                raise ChainFileError(f"P({src}, {dst}) is not a finite number")
    return doc


def load_chain(path):
    """Read and validate a chain file."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return validate(parse_chain_text(text))


def chain_to_dict(chain):
    labels = chain.space.labels
    rows = {}
    for i, src in enumerate(chain.space.transient):
        rows[src] = {labels[b]: float(p) for b, p in enumerate(chain.kernel[i]) if p != 0}
    return {
        "transient": list(chain.space.transient),
        "absorbing": list(chain.space.absorbing),
        "rows": rows,
    }


def dump_chain(chain):
    return json.dumps(chain_to_dict(chain), ensure_ascii=False, indent=2) + "\n"
