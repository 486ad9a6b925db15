"""Report documents in text and JSON form.

Every scalar is rounded to 15 significant digits when the document is built,
so ``parse_json(emit_json(doc)) == doc`` holds exactly and the text form,
which prints the same rounded values, carries identical numbers.
"""

from dataclasses import asdict, dataclass, field
import json

from .canonical import build_pi
from .entropy import unit_name
from .qsd import compute_qsd, DEFAULT_MAX_ITER, DEFAULT_TOL
from .representations import entropy_report
from .resurrection import resurrect

SIG_DIGITS = 15
ENTROPY_KEYS = ("h_X", "h_Y", "h_YK", "h_YA", "delta_B", "delta_D", "h_G", "residual_plus_signs")
STATIONARITY_KEYS = ("stationary_pi", "stationary_mu_Q", "stationary_nu", "stationary_zeta", "stationary_eta")
REPORT_TOL = 1e-10


def r15(x):
    return float(f"{x:.{SIG_DIGITS}g}")


def fmt(x):
    return f"{x:.{SIG_DIGITS}g}"


def _round(obj):
    if isinstance(obj, float):
        return r15(obj)
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


@dataclass
class ReportDocument:
    chain: dict
    qsd: dict
    pi: dict
    q: list
    entropy: dict
    residuals: dict
    empirical: list = field(default_factory=list)

    def __post_init__(self):
        for name in ("qsd", "pi", "q", "entropy", "residuals", "empirical"):
            setattr(self, name, _round(getattr(self, name)))

    @property
    def base(self):
        return self.entropy["base"]

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)

    def passed(self, tol=REPORT_TOL):
        r = self.residuals
        return r["balance_derived"] < tol and all(r[k] < tol for k in STATIONARITY_KEYS)


def build_report(chain, base="e", tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, empirical=None):
    qsd = compute_qsd(chain, tol=tol, max_iter=max_iter)
    er = entropy_report(chain, qsd, base)
    cs = build_pi(chain, qsd)
    rc = resurrect(chain, qsd)
    labels = chain.space.labels
    entropy = {k: getattr(er, k) for k in ENTROPY_KEYS}
    entropy["base"] = er.base
    return ReportDocument(
        chain={
            "transient": list(chain.space.transient),
            "absorbing": list(chain.space.absorbing),
        },
        qsd={
            "mu": dict(zip(chain.space.transient, qsd.mu.tolist())),
            "gamma": qsd.gamma,
            "residual": qsd.residual,
            "iterations": qsd.iterations,
            "pi_I": er.pi_I,
            "pi_E": er.pi_E,
        },
        pi=dict(zip(labels, cs.pi.tolist())),
        q=rc.q.tolist(),
        entropy=entropy,
        residuals=dict(er.residuals),
        empirical=[asdict(c) for c in empirical] if empirical else [],
    )


def emit_json(doc):
    return json.dumps(doc.to_dict(), ensure_ascii=False, indent=2) + "\n"


def parse_json(text):
    return ReportDocument.from_dict(json.loads(text))


def numeric_items(doc):
    """Flattened ``(key, value)`` pairs of every number in the document."""
    labels = doc.chain["transient"]
    for lab, v in doc.qsd["mu"].items():
        yield f"mu[{lab}]", v
    for k in ("gamma", "pi_I", "pi_E", "residual", "iterations"):
        yield f"qsd.{k}", doc.qsd[k]
    for lab, v in doc.pi.items():
        yield f"pi[{lab}]", v
    for a, row in zip(labels, doc.q):
        for b, v in zip(labels, row):
            yield f"Q[{a},{b}]", v
    for k in ENTROPY_KEYS:
        yield k, doc.entropy[k]
    for k, v in doc.residuals.items():
        yield f"residual.{k}", v
    for c in doc.empirical:
        yield f"check.{c['name']}.target", c["target"]
        yield f"check.{c['name']}.observed", c["observed"]
        yield f"check.{c['name']}.tol", c["tol"]


def emit_text(doc):
    unit = unit_name(doc.base)
    lines = [
        "# absorbed chain report",
        f"transient: {' '.join(doc.chain['transient'])}",
        f"absorbing: {' '.join(doc.chain['absorbing'])}",
        f"log base: {doc.base} ({unit})",
    ]
    entropic = set(ENTROPY_KEYS) | {
        "residual." + k for k in doc.residuals if k.startswith(("h_", "delta", "balance"))
    }
    for key, value in numeric_items(doc):
        text = str(value) if isinstance(value, int) else fmt(value)
        suffix = f" {unit}" if key in entropic else ""
        lines.append(f"{key} = {text}{suffix}")
    for c in doc.empirical:
        lines.append(f"verdict {c['name']} = {'PASS' if c['passed'] else 'FAIL'}")
    return "\n".join(lines) + "\n"


def parse_text_numbers(text):
    """Inverse of the numeric part of :func:`emit_text`: ``{key: value}``."""
    out = {}
    for line in text.splitlines():
        if " = " not in line or line.startswith(("#", "verdict")):
            continue
        key, rest = line.split(" = ", 1)
        token = rest.split()[0]
        out[key] = int(token) if key == "qsd.iterations" else float(token)
    return out
