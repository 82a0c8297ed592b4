"""Run reports: deterministic JSON plus a plain-text rendering."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

SCHEMA = "metrika-report/1"


def to_plain(obj):
    """Recursively turn results into JSON-native values (inf becomes the string "inf")."""
    if hasattr(obj, "to_json"):
        return to_plain(obj.to_json())
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
        return obj
    if hasattr(obj, "tolist"):
        return to_plain(obj.tolist())
    if hasattr(obj, "value") and not isinstance(obj, (int, str, bool)):  # enums
        return obj.value
    return obj


def digest(inputs) -> str:
    blob = json.dumps(to_plain(inputs), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass
class RunReport:
    command: list
    inputs: dict
    results: dict = field(default_factory=dict)
    exit_code: int = 0

    def to_json(self) -> dict:
        return {"schema": SCHEMA,
                "command": list(self.command),
                "inputs_digest": digest(self.inputs),
                "exit_code": self.exit_code,
                "results": to_plain(self.results)}

    def render_json(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)

    def render_text(self) -> str:
        data = self.to_json()
        lines = [f"metrika {' '.join(data['command'])}", f"inputs {data['inputs_digest']}"]
        _text(data["results"], lines, 0)
        lines.append(f"exit {data['exit_code']}")
        return "\n".join(lines)


def _scalar_text(v) -> str:
    if isinstance(v, dict) and "approx" in v:
        return f"~{v['approx']:.12g}"
    return json.dumps(v) if not isinstance(v, str) else v


def _text(obj, lines, depth):
    pad = "  " * depth
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, dict) and "approx" not in v or isinstance(v, list) and v and isinstance(v[0], (dict, list)):
                if isinstance(v, dict) and "status" in v and "property" in v:
                    lines.append(f"{pad}{k}: {v['status']} ({v.get('basis', {}).get('name') or v.get('basis', {}).get('kind', '')})")
                    if "counterexample" in v:
                        ce = v["counterexample"]
                        lines.append(f"{pad}  counterexample {ce['relation']}: "
                                     f"inputs {[_scalar_text(x) for x in ce['inputs']]} values {[_scalar_text(x) for x in ce['values']]}")
                    continue
                lines.append(f"{pad}{k}:")
                _text(v, lines, depth + 1)
            elif isinstance(v, list):
                lines.append(f"{pad}{k}: [{', '.join(_scalar_text(x) for x in v)}]")
            else:
                lines.append(f"{pad}{k}: {_scalar_text(v)}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            if isinstance(v, list) and not any(isinstance(x, (dict, list)) for x in v):
                lines.append(f"{pad}- [{', '.join(_scalar_text(x) for x in v)}]")
            else:
                lines.append(f"{pad}- [{i}]")
                _text(v, lines, depth + 1)
    else:
        lines.append(f"{pad}{_scalar_text(obj)}")
