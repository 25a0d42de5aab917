"""JSON scenario files.

Exactly one of two top-level blocks is allowed:

``form``
    ``{"A": [[...]], "L": [[...]], "v_bar": [...]}``; every entry is a real
    number or an ``[re, im]`` pair.
``mrc``
    ``{"P": 2, "k": [1, 0.5], "rho": 0.5, "M": 16, "gamma_th_db": 0,
    "gamma_bar_db": [lo, hi, step], "covariance": "unit-power"}``

plus optional ``m`` or ``mse_target``, ``precision_bits``, ``seed`` and
``label``.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import CgqfError, NotHermitian, ParseError
from .mrc import MrcScenario
from .reduction import QuadraticForm
from .residues import DEFAULT_PRECISION

DEFAULT_MSE_TARGET = 1e-2
_TOP_KEYS = {"form", "mrc", "m", "mse_target", "precision_bits", "seed", "label"}
_MRC_KEYS = {"P", "k", "rho", "M", "gamma_th_db", "gamma_bar_db", "covariance"}


@dataclass(frozen=True)
class Scenario:
    form: QuadraticForm = None
    mrc: MrcScenario = None
    m: int = None
    mse_target: float = None
    precision_bits: int = DEFAULT_PRECISION
    seed: int = 0
    label: str = ""

    @property
    def kind(self):
        return "form" if self.form is not None else "mrc"


def _number(v, where):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(f"{where}: expected a number, got {json.dumps(v)}")
    return float(v)


def _scalar(v, where):
    if isinstance(v, list):
        if len(v) != 2:
            raise ParseError(f"{where}: complex entries are [re, im] pairs, got {len(v)} values")
        return complex(_number(v[0], where + "[0]"), _number(v[1], where + "[1]"))
    return complex(_number(v, where))


def _matrix(v, where):
    if not isinstance(v, list) or not v or not all(isinstance(r, list) for r in v):
        raise ParseError(f"{where}: expected a non-empty list of rows")
    n = len(v)
    for i, row in enumerate(v):
        if len(row) != n:
            raise ParseError(f"{where}[{i}]: expected {n} entries, got {len(row)} (matrix must be square)")
    return np.array([[_scalar(x, f"{where}[{i}][{j}]") for j, x in enumerate(row)] for i, row in enumerate(v)])


def _vector(v, where):
    if not isinstance(v, list) or not v:
        raise ParseError(f"{where}: expected a non-empty list")
    return np.array([_scalar(x, f"{where}[{i}]") for i, x in enumerate(v)])


def _form(block):
    if not isinstance(block, dict):
        raise ParseError("form: expected an object with A, L, v_bar")
    missing = {"A", "L", "v_bar"} - set(block)
    if missing:
        raise ParseError(f"form: missing field(s) {sorted(missing)}")
    extra = set(block) - {"A", "L", "v_bar"}
    if extra:
        raise ParseError(f"form: unknown field(s) {sorted(extra)}")
    A = _matrix(block["A"], "form.A")
    L = _matrix(block["L"], "form.L")
    v = _vector(block["v_bar"], "form.v_bar")
    if not (A.shape == L.shape and A.shape[0] == v.size):
        raise ParseError(f"form: dimension mismatch A{A.shape}, L{L.shape}, v_bar({v.size})")
    try:
        return QuadraticForm(A, L, v)
    except NotHermitian as exc:
        raise ParseError(
            f"form.{exc.name}[{exc.i}][{exc.j}] is not the conjugate of form.{exc.name}[{exc.j}][{exc.i}] "
            f"(deviation {exc.deviation:.3g})"
        ) from exc
    except CgqfError as exc:
        raise ParseError(f"form: {exc}") from exc


def _mrc(block, m, mse_target, label):
    if not isinstance(block, dict):
        raise ParseError("mrc: expected an object")
    extra = set(block) - _MRC_KEYS
    if extra:
        raise ParseError(f"mrc: unknown field(s) {sorted(extra)}")
    for key in ("k", "rho"):
        if key not in block:
            raise ParseError(f"mrc: missing field {key!r}")
    k = block["k"]
    if not isinstance(k, list) or not k:
        raise ParseError("mrc.k: expected a non-empty list of Rician factors")
    k = [_number(x, f"mrc.k[{i}]") for i, x in enumerate(k)]
    if "P" in block and block["P"] != len(k):
        raise ParseError(f"mrc.P = {block['P']} but mrc.k has {len(k)} entries")
    grid = block.get("gamma_bar_db", [0, 20, 2])
    if not (isinstance(grid, list) and len(grid) == 3):
        raise ParseError("mrc.gamma_bar_db: expected [lo, hi, step]")
    lo, hi, step = (_number(x, f"mrc.gamma_bar_db[{i}]") for i, x in enumerate(grid))
    if step <= 0 or hi < lo:
        raise ParseError("mrc.gamma_bar_db: need lo <= hi and step > 0")
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    db = tuple(float(lo + i * step) for i in range(n))
    M = block.get("M", 4)
    if isinstance(M, bool) or not isinstance(M, int):
        raise ParseError("mrc.M: expected an integer")
    try:
        return MrcScenario(
            k=tuple(k),
            rho=_number(block["rho"], "mrc.rho"),
            M=M,
            m=m,
            mse_target=mse_target if mse_target is not None else DEFAULT_MSE_TARGET,
            gamma_bar_db=db,
            gamma_th_db=_number(block.get("gamma_th_db", 0.0), "mrc.gamma_th_db"),
            covariance=block.get("covariance", "unit-power"),
            label=label,
        )
    except CgqfError as exc:
        raise ParseError(f"mrc: {exc}") from exc


def parse_scenario(text, source="<input>"):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{source}: top level must be a JSON object")
    extra = set(doc) - _TOP_KEYS
    if extra:
        raise ParseError(f"{source}: unknown top-level field(s) {sorted(extra)}")
    if ("form" in doc) == ("mrc" in doc):
        raise ParseError(f"{source}: exactly one of 'form' or 'mrc' is required")
    if "m" in doc and "mse_target" in doc:
        raise ParseError(f"{source}: give either 'm' or 'mse_target', not both")
    m = doc.get("m")
    if m is not None and (isinstance(m, bool) or not isinstance(m, int) or m < 1):
        raise ParseError(f"{source}: m must be a positive integer")
    mse_target = doc.get("mse_target")
    if mse_target is not None and not _number(mse_target, "mse_target") > 0:
        raise ParseError(f"{source}: mse_target must be positive")
    bits = doc.get("precision_bits", DEFAULT_PRECISION)
    if isinstance(bits, bool) or not isinstance(bits, int) or bits < 64:
        raise ParseError(f"{source}: precision_bits must be an integer >= 64")
    seed = doc.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ParseError(f"{source}: seed must be an integer in [0, 2**64)")
    label = str(doc.get("label", ""))
    if "form" in doc:
        return Scenario(form=_form(doc["form"]), m=m, mse_target=mse_target,
                        precision_bits=bits, seed=seed, label=label)
    return Scenario(mrc=_mrc(doc["mrc"], m, mse_target, label), m=m, mse_target=mse_target,
                    precision_bits=bits, seed=seed, label=label)


def load_scenario(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    return parse_scenario(text, str(path))
