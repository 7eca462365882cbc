"""Command line front end: read a TOML config, run its tasks, print a report.

Config layout::

    kappa = [["0", "1"], ["1", "0"]]      # rationals as "p/q" strings or integers
    Q = [["1"], ["0"]]
    seed = 0                              # optional

    [structure]
    variant = "compact"                   # compact | kernel | toral
    lattice = [["0", "3"], ["1", "3/2"]]  # Gamma basis, or spanning set of Lambda for kernel

    [output]
    format = "text"                       # text | json
    digits = 12

    [[tasks]]
    kind = "check"

Task kinds and their keys:

    check                                     input and structure condition ledgers
    constants                                 Delta_+, Delta_-, zeta, D
    hopf      circle, strand, [circle_parity, strand_parity]
    tangle    word (text of a tangle word)
    surgery   preset = "sphere":  weight, framing, [parity]
              preset = "circle_bundle": alpha, beta1, beta
              or word, surgery (Kirby colour names), linking, [m]
    verlinde  g, beta, [insertions = [{weight = [...], parity = 0}]]
    euler     g
    bethe     g
    gl11      s, t, u, g

Exit status: 0 on success, 2 if a hypothesis or condition fails, 1 on any other error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Sequence

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .gwdata import GWInput, check_input, effective_metric
from .invariants import (
    NotAdmissible,
    SurgeryPresentation,
    bethe_check,
    cgp_invariant,
    circle_bundle_presentation,
    euler_characteristic,
    gl11_chi,
    sphere_presentation,
    state_space_dimension,
    verlinde_partition,
)
from .relmod import (
    VARIANTS,
    HypothesisFailed,
    RelModStructure,
    build_structure,
    check_free_realization,
    structure_constants,
)
from .repcat import open_hopf, open_hopf_scalar, twist, twist_scalar, verma
from .scalar import Cyclotomic, format_decimal, to_fraction
from .tangle import ModuleCache, evaluate, module_resolver, parse_word
from .tangle import ParseError as WordParseError

__all__ = ["ParseError", "ValidationFailure", "Config", "TaskSpec", "load_config", "parse_config",
           "run", "render", "exact", "from_exact", "main"]

TASK_KINDS = ("check", "constants", "hopf", "tangle", "surgery", "verlinde", "euler", "bethe", "gl11")
TASK_KEYS = {
    "check": set(),
    "constants": set(),
    "hopf": {"circle", "strand", "circle_parity", "strand_parity"},
    "tangle": {"word"},
    "surgery": {"preset", "weight", "framing", "parity", "alpha", "beta1", "beta",
                "word", "surgery", "linking", "m"},
    "verlinde": {"g", "beta", "insertions"},
    "euler": {"g"},
    "bethe": {"g"},
    "gl11": {"s", "t", "u", "g"},
}


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        where = f"line {line}, column {col}: " if line else ""
        super().__init__(where + message)


class ValidationFailure(ValueError):
    pass


@dataclass(frozen=True)
class TaskSpec:
    kind: str
    params: dict


@dataclass(frozen=True)
class Config:
    kappa: tuple
    Q: tuple
    variant: str | None
    lattice: tuple | None
    tasks: tuple[TaskSpec, ...]
    format: str = "text"
    digits: int = 12
    seed: int = 0
    source: str = field(default="", repr=False, compare=False)


# ------------------------------------------------------------------ parsing


def _locate(source: str, needle: str) -> tuple[int, int]:
    for i, line in enumerate(source.splitlines(), 1):
        col = line.find(needle)
        if col >= 0:
            return i, col + 1
    return 0, 0


class _Reader:
    def __init__(self, source: str):
        self.source = source

    def fail(self, msg: str, token: Any = None) -> ParseError:
        line, col = (0, 0)
        if token is not None:
            line, col = _locate(self.source, json.dumps(token) if isinstance(token, str) else str(token))
        return ParseError(msg, line, col)

    def rational(self, x: Any, what: str) -> Fraction:
        if isinstance(x, bool) or not isinstance(x, (int, str)):
            raise self.fail(f"{what}: expected an integer or a \"p/q\" string, got {x!r}", x)
        try:
            return to_fraction(x)
        except (ValueError, ZeroDivisionError):
            raise self.fail(f"{what}: malformed rational {x!r}", x) from None

    def vector(self, xs: Any, what: str) -> tuple[Fraction, ...]:
        if not isinstance(xs, list):
            raise self.fail(f"{what}: expected a list", xs)
        return tuple(self.rational(x, what) for x in xs)

    def matrix(self, rows: Any, what: str) -> tuple[tuple[Fraction, ...], ...]:
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise self.fail(f"{what}: expected a list of rows")
        out = tuple(self.vector(r, what) for r in rows)
        if out and any(len(r) != len(out[0]) for r in out):
            raise self.fail(f"{what}: rows have different lengths")
        return out

    def integer(self, x: Any, what: str) -> int:
        if isinstance(x, bool) or not isinstance(x, int):
            raise self.fail(f"{what}: expected an integer, got {x!r}", x)
        return x


def _unknown(keys, allowed, where: str, reader: _Reader) -> None:
    extra = sorted(set(keys) - set(allowed))
    if extra:
        raise reader.fail(f"unknown key {extra[0]!r} in {where}", extra[0])


def parse_config(source: str) -> Config:
    try:
        raw = tomllib.loads(source)
    except tomllib.TOMLDecodeError as e:
        m = re.search(r"line (\d+), column (\d+)", str(e))
        if m:
            line, col = int(m.group(1)), int(m.group(2))
        else:
            # end of document: point just past the last character
            lines = source.split("\n")
            line, col = len(lines), len(lines[-1]) + 1
        raise ParseError(str(e).split(" (at")[0], line, col) from None
    rd = _Reader(source)
    _unknown(raw, {"kappa", "Q", "seed", "structure", "output", "tasks"}, "the top level", rd)
    if "kappa" not in raw:
        raise ParseError("missing key 'kappa'")
    kappa = rd.matrix(raw["kappa"], "kappa")
    Q = rd.matrix(raw.get("Q", []), "Q")
    if Q and len(Q) != len(kappa):
        raise rd.fail("Q must have one row per row of kappa")

    variant = lattice = None
    st = raw.get("structure")
    if st is not None:
        _unknown(st, {"variant", "lattice"}, "[structure]", rd)
        variant = st.get("variant")
        if variant not in VARIANTS:
            raise rd.fail(f"structure.variant must be one of {', '.join(VARIANTS)}", variant)
        lattice = rd.matrix(st.get("lattice", []), "structure.lattice")
        if variant == "toral" and not lattice:
            lattice = tuple(tuple(Fraction(int(i == j)) for j in range(len(kappa))) for i in range(len(kappa)))

    out = raw.get("output", {})
    _unknown(out, {"format", "digits"}, "[output]", rd)
    fmt = out.get("format", "text")
    if fmt not in ("text", "json"):
        raise rd.fail("output.format must be 'text' or 'json'", fmt)
    digits = rd.integer(out.get("digits", 12), "output.digits")
    if digits < 1:
        raise rd.fail("output.digits must be positive", digits)

    tasks = []
    for t in raw.get("tasks", []):
        kind = t.get("kind")
        if kind not in TASK_KINDS:
            raise rd.fail(f"unknown task kind {kind!r}", kind)
        _unknown(set(t) - {"kind"}, TASK_KEYS[kind], f"task {kind!r}", rd)
        tasks.append(TaskSpec(kind, _task_params(kind, t, rd)))
    seed = rd.integer(raw.get("seed", 0), "seed")
    return Config(kappa, Q, variant, lattice, tuple(tasks), fmt, digits, seed, source)


def _task_params(kind: str, t: dict, rd: _Reader) -> dict:
    p: dict = {}

    def need(key: str):
        if key not in t:
            raise rd.fail(f"task {kind!r} needs {key!r}")
        return t[key]

    if kind in ("verlinde", "euler", "bethe", "gl11"):
        p["g"] = rd.integer(need("g"), "g")
    if kind == "hopf":
        p["circle"] = rd.vector(need("circle"), "circle")
        p["strand"] = rd.vector(need("strand"), "strand")
        p["circle_parity"] = rd.integer(t.get("circle_parity", 0), "circle_parity") % 2
        p["strand_parity"] = rd.integer(t.get("strand_parity", 0), "strand_parity") % 2
    elif kind == "tangle":
        p["word"] = _word(need("word"), rd)
    elif kind == "surgery":
        preset = t.get("preset")
        p["preset"] = preset
        if preset == "sphere":
            p["weight"] = rd.vector(need("weight"), "weight")
            p["framing"] = rd.integer(t.get("framing", 0), "framing")
            p["parity"] = rd.integer(t.get("parity", 0), "parity") % 2
        elif preset == "circle_bundle":
            for key in ("alpha", "beta1", "beta"):
                p[key] = rd.vector(need(key), key)
        elif preset is None:
            p["word"] = _word(need("word"), rd)
            p["surgery"] = tuple(str(x) for x in need("surgery"))
            p["linking"] = tuple(tuple(rd.integer(x, "linking") for x in row) for row in need("linking"))
            p["m"] = rd.integer(t.get("m", 0), "m")
        else:
            raise rd.fail(f"unknown surgery preset {preset!r}", preset)
    elif kind == "verlinde":
        p["beta"] = rd.vector(need("beta"), "beta")
        ins = []
        for item in t.get("insertions", []):
            _unknown(item, {"weight", "parity"}, "an insertion", rd)
            ins.append((rd.vector(item["weight"], "insertion weight"), rd.integer(item.get("parity", 0), "parity") % 2))
        p["insertions"] = tuple(ins)
    elif kind == "gl11":
        p["s"] = rd.integer(need("s"), "s")
        p["t"] = rd.integer(need("t"), "t")
        p["u"] = rd.rational(need("u"), "u")
    return p


def _word(text: Any, rd: _Reader):
    if not isinstance(text, str):
        raise rd.fail("a tangle word must be a string")
    try:
        return parse_word(text)
    except WordParseError as e:
        # shift the position from the word to the config file
        line, col = _locate(rd.source, text.splitlines()[e.line - 1].strip()) if e.line else (0, 0)
        raise ParseError(f"in tangle word: {e}", line, col) from None


def load_config(path: str) -> Config:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


# ------------------------------------------------------------------ serialisation


def exact(z: Cyclotomic) -> dict:
    """Canonical exact form: the element in its smallest cyclotomic field."""
    return z.minimal().to_dict()


def from_exact(d: dict) -> Cyclotomic:
    return Cyclotomic.from_dict(d)


def _plain(x: Any) -> Any:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, Cyclotomic):
        return exact(x)
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return str(x)


def _value(z: Cyclotomic, digits: int) -> dict:
    return {"exact": exact(z), "decimal": format_decimal(z, digits)}


def _ledger(report) -> list[dict]:
    return [{"name": c.name, "passed": c.passed, "witness": _plain(c.witness), "detail": c.detail}
            for c in report.conditions]


# ------------------------------------------------------------------ running


class _Context:
    def __init__(self, cfg: Config, seed: int):
        self.cfg = cfg
        self.seed = seed
        self.data = GWInput(cfg.kappa, cfg.Q or None)
        self._structure: RelModStructure | None = None
        self._constants = None

    @property
    def structure(self) -> RelModStructure:
        if self._structure is None:
            if self.cfg.variant is None:
                raise ValueError("this task needs a [structure] section")
            self._structure = build_structure(self.data, self.cfg.variant, self.cfg.lattice)
        return self._structure

    @property
    def constants(self):
        if self._constants is None:
            self._constants = structure_constants(self.structure, seed=self.seed)
        return self._constants


def _task_check(ctx: _Context, p: dict) -> dict:
    inp = check_input(ctx.data)
    out = {"input": _ledger(inp), "effective_metric": _plain(effective_metric(ctx.data))}
    ok = inp.passed
    if ctx.cfg.variant is not None:
        try:
            s = ctx.structure
            out["structure"] = _ledger(s.report)
            real = check_free_realization(s, seed=ctx.seed)
            out["realization"] = _ledger(real)
            ok = ok and real.passed
            if s.disc is not None:
                out["discriminant_order"] = s.order
                out["invariant_factors"] = list(s.invariant_factors)
        except HypothesisFailed as e:
            out["structure"] = _ledger(e.report)
            ok = False
    if not ok:
        raise ValidationFailure(out)
    return out


def _task_constants(ctx: _Context, p: dict) -> dict:
    c = ctx.constants
    d = ctx.cfg.digits
    return {
        "delta_plus": _value(c.delta_plus, d),
        "delta_minus": _value(c.delta_minus, d),
        "zeta": _value(c.zeta, d),
        "script_d": _value(c.script_d, d),
        "probes": _plain(c.probes),
        "matrix_check_probe": _plain(c.check_probe),
    }


def _task_hopf(ctx: _Context, p: dict) -> dict:
    data, d = ctx.data, ctx.cfg.digits
    A = verma(data, p["circle"], p["circle_parity"])
    B = verma(data, p["strand"], p["strand_parity"])
    hopf = open_hopf(A, B).matrix.scalar()
    closed = open_hopf_scalar(data, p["circle"], p["circle_parity"], p["strand"], p["strand_parity"])
    tw = twist(B).matrix.scalar()
    out = {
        "open_hopf": _value(hopf, d),
        "open_hopf_closed_form": _value(closed, d),
        "twist": _value(tw, d),
        "twist_closed_form": _value(twist_scalar(data, p["strand"]), d),
    }
    out["agree"] = hopf == closed and tw == twist_scalar(data, p["strand"])
    if not out["agree"]:
        raise RuntimeError("matrix evaluation disagrees with the closed form")
    return out


def _task_tangle(ctx: _Context, p: dict) -> dict:
    w = p["word"]
    ev = evaluate(w, module_resolver(ctx.data, w.colour_table), ModuleCache())
    m = ev.matrix
    out: dict = {"shape": list(m.shape)}
    c = m.scalar()
    if c is not None:
        out["scalar"] = _value(c, ctx.cfg.digits)
    else:
        out["entries"] = [{"row": i, "col": j, "value": _value(v, ctx.cfg.digits)}
                          for (i, j), v in sorted(m.data.items())]
    return out


def _task_surgery(ctx: _Context, p: dict) -> dict:
    s = ctx.structure
    if p["preset"] == "sphere":
        pres = sphere_presentation(s, p["weight"], p["framing"], p["parity"])
    elif p["preset"] == "circle_bundle":
        pres = circle_bundle_presentation(p["alpha"], p["beta1"], p["beta"])
    else:
        pres = SurgeryPresentation(p["word"], p["surgery"], p["linking"], p["m"])
    z = cgp_invariant(s, pres, ctx.constants)
    out = {"invariant": _value(z, ctx.cfg.digits)}
    if p["preset"] == "circle_bundle":
        v = verlinde_partition(s, 1, p["beta"])
        out["verlinde_g1"] = _value(v, ctx.cfg.digits)
        out["agree"] = v == z
    return out


def _task_verlinde(ctx: _Context, p: dict) -> dict:
    z = verlinde_partition(ctx.structure, p["g"], p["beta"], p["insertions"])
    return {"g": p["g"], "value": _value(z, ctx.cfg.digits)}


def _task_euler(ctx: _Context, p: dict) -> dict:
    s = ctx.structure
    out = {"g": p["g"], "euler_characteristic": _value(euler_characteristic(s, p["g"]), ctx.cfg.digits)}
    try:
        out["dimension"] = state_space_dimension(s, p["g"])
    except ValueError:
        pass
    return out


def _task_bethe(ctx: _Context, p: dict) -> dict:
    r = bethe_check(ctx.structure, p["g"])
    d = ctx.cfg.digits
    return {"g": p["g"], "via_bethe": _value(r.chi_via_bethe, d), "closed_form": _value(r.chi_closed_form, d),
            "vacua": r.solutions, "equal": r.equal}


def _task_gl11(ctx: _Context, p: dict) -> dict:
    return {"s": p["s"], "t": p["t"], "u": str(p["u"]), "g": p["g"],
            "euler_characteristic": gl11_chi(p["s"], p["t"], p["u"], p["g"])}


_TASKS = {
    "check": _task_check,
    "constants": _task_constants,
    "hopf": _task_hopf,
    "tangle": _task_tangle,
    "surgery": _task_surgery,
    "verlinde": _task_verlinde,
    "euler": _task_euler,
    "bethe": _task_bethe,
    "gl11": _task_gl11,
}


def run(cfg: Config, seed: int | None = None, timing: bool = False) -> tuple[dict, int]:
    """Run the tasks in order. Returns the report and the exit status."""
    seed = cfg.seed if seed is None else seed
    report: dict = {"seed": seed, "variant": cfg.variant, "tasks": []}
    status = 0
    try:
        ctx = _Context(cfg, seed)
    except ValueError as e:
        report["error"] = str(e)
        return report, 1
    for i, t in enumerate(cfg.tasks):
        entry: dict = {"index": i, "kind": t.kind}
        t0 = time.perf_counter()
        try:
            entry["result"] = _TASKS[t.kind](ctx, t.params)
            entry["status"] = "ok"
        except ValidationFailure as e:
            entry["status"] = "failed"
            entry["result"] = e.args[0]
            status = max(status, 2)
        except HypothesisFailed as e:
            entry["status"] = "failed"
            entry["error"] = str(e)
            entry["ledger"] = _ledger(e.report)
            status = max(status, 2)
        except (NotAdmissible, ValueError, ArithmeticError, RuntimeError) as e:
            entry["status"] = "error"
            entry["error"] = f"{type(e).__name__}: {e}"
            status = 1 if status == 0 else status
        if timing:
            entry["seconds"] = round(time.perf_counter() - t0, 3)
        report["tasks"].append(entry)
    return report, status


# ------------------------------------------------------------------ rendering


def _text_lines(x: Any, indent: int) -> list[str]:
    pad = "  " * indent
    lines: list[str] = []
    if isinstance(x, dict):
        if set(x) == {"exact", "decimal"}:
            e = x["exact"]
            return [f"{pad}{x['decimal']}   [N={e['conductor']}: {' '.join(e['coefficients'])}]"]
        for k, v in x.items():
            if isinstance(v, (dict, list)) and not _is_leafy(v):
                lines.append(f"{pad}{k}:")
                lines.extend(_text_lines(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_text_lines(v, 0)[0].strip()}")
    elif isinstance(x, list):
        if x and all(isinstance(v, dict) and set(v) == {"row", "col", "value"} for v in x):
            for v in x:
                lines.append(f"{pad}({v['row']}, {v['col']}): {_text_lines(v['value'], 0)[0]}")
        elif x and all(isinstance(v, dict) and "name" in v and "passed" in v for v in x):
            for v in x:
                mark = "pass" if v["passed"] else "FAIL"
                w = "" if v["witness"] is None else f"  witness={json.dumps(v['witness'])}"
                lines.append(f"{pad}[{mark}] {v['name']}{w}")
        elif _is_leafy(x):
            lines.append(pad + json.dumps(x))
        else:
            for v in x:
                lines.extend(_text_lines(v, indent))
    else:
        lines.append(pad + str(x))
    return lines


def _is_leafy(x: Any) -> bool:
    if isinstance(x, dict):
        return set(x) == {"exact", "decimal"}
    if isinstance(x, list):
        return all(not isinstance(v, dict) and (not isinstance(v, list) or _is_leafy(v)) for v in x)
    return True


def render(report: dict, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    lines = [f"seed: {report['seed']}", f"variant: {report['variant']}"]
    if "error" in report:
        lines.append(f"error: {report['error']}")
    for entry in report["tasks"]:
        head = f"== task {entry['index']}: {entry['kind']} [{entry['status']}]"
        if "seconds" in entry:
            head += f" ({entry['seconds']} s)"
        lines.append(head)
        if "error" in entry:
            lines.append(f"  error: {entry['error']}")
        for key in ("result", "ledger"):
            if key in entry:
                lines.extend(_text_lines(entry[key], 1))
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ entry point


def main(argv: Sequence[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="gwtqft", description="Run invariant computations from a TOML config.")
    ap.add_argument("config", help="path to the TOML config")
    ap.add_argument("--format", choices=("text", "json"), help="override output.format")
    ap.add_argument("--digits", type=int, help="override output.digits")
    ap.add_argument("--seed", type=int, help="override the config seed")
    ap.add_argument("--timing", action="store_true", help="add per-task wall times (reports are then not reproducible)")
    args = ap.parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ParseError as e:
        print(f"{args.config}: parse error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"{args.config}: {e}", file=sys.stderr)
        return 1
    if args.digits is not None:
        if args.digits < 1:
            print("--digits must be positive", file=sys.stderr)
            return 1
        cfg = replace(cfg, digits=args.digits)
    if args.format:
        cfg = replace(cfg, format=args.format)
    report, status = run(cfg, seed=args.seed, timing=args.timing)
    sys.stdout.write(render(report, cfg.format))
    return status


if __name__ == "__main__":
    sys.exit(main())
