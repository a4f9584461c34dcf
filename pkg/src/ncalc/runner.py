"""Scenario dispatch: each command turns a JSON config into checks and output files."""
from __future__ import annotations

import itertools
import json
import math
from pathlib import Path

import numpy as np

from . import fock, process, type2
from .algebra import BUILTIN_NAMES, builtin_algebra, check_structure, parse_algebra
from .algebra.expr import OperatorExpr
from .errors import InputError
from .ito import derive_ito_table, render_table, table_from_json
from .report import RunReport, atomic_write, csv_text
from .reps.bessel import bessel_k, bessel_k_series
from .reps.grids import make_grid
from .reps.representation import (MANIFOLD_OF, WaveFunction, build_representation,
                                  commutator_residuals, probe_set, vacuum_expectation, vacuum_state)
from .testfunc import TestFunction

COMMANDS = ("verify", "ito", "charfunc", "integral", "type2")

# default tolerances per check family
TOLERANCES = {
    "structure": 1e-12,
    "commutator": 1e-6,
    "commutator_coth": 1e-5,
    "convergence_order": 2.0,
    "vacuum": 1e-8,
    "normalization": 1e-8,
    "expectation": 1e-8,
    "bessel": 1e-10,
    "fd_oracle": 1e-6,
    "fock_sum": 1e-12,
    "gram": 1e-10,
    "ito_slope": 1.8,
    "ito_richardson": 1e-3,
    "smeared": 1e-6,
    "rotation": 1e-6,
    "charfunc": 1e-8,
    "isotropy": 1e-8,
    "small_u": 1e-5,
    "moment": 1e-5,
    "agreement": 1e-8,
    "vacuum_bra": 1e-10,
    "eigen": 1e-10,
    "orthogonality": 1e-12,
    "type2": 1e-8,
    "exact": 1e-12,
    "roundtrip": 0.5,
}
CONVERGENCE_FLOOR = 1e-10


class Context:
    """Config access with validation and tolerance lookup."""

    def __init__(self, config: dict, base_dir: Path):
        if not isinstance(config, dict):
            raise InputError("scenario config must be a JSON object")
        self.config = config
        self.base_dir = base_dir
        tols = config.get("tolerances", {})
        if not isinstance(tols, dict):
            raise InputError("'tolerances' must be an object")
        for k, v in tols.items():
            if k not in TOLERANCES:
                raise InputError(f"unknown tolerance family {k!r}")
            if not isinstance(v, (int, float)) or not v > 0:
                raise InputError(f"tolerance {k!r} must be strictly positive")
        self._tols = dict(tols)
        g = config.get("tolerance")
        if g is not None and (not isinstance(g, (int, float)) or not g > 0):
            raise InputError("'tolerance' must be strictly positive")
        self._global = g

    def tol(self, family: str) -> float:
        if family in self._tols:
            return float(self._tols[family])
        if self._global is not None and family not in ("convergence_order", "ito_slope"):
            return float(self._global)
        return TOLERANCES[family]

    def get(self, key, default=None):
        return self.config.get(key, default)

    def require(self, key):
        if key not in self.config:
            raise InputError(f"config is missing the {key!r} field")
        return self.config[key]

    def algebra(self):
        """(spec, builtin name or None)."""
        if "dsl" in self.config:
            path = self.base_dir / self.config["dsl"]
            if not path.exists():
                raise InputError(f"DSL file {path} does not exist")
            return parse_algebra(path.read_text(encoding="utf-8")), None
        name = self.require("algebra")
        if name not in BUILTIN_NAMES:
            raise InputError(f"unknown algebra {name!r}; expected one of {', '.join(BUILTIN_NAMES)}")
        return builtin_algebra(name), name

    def grid(self, manifold):
        g = self.get("grid", {}) or {}
        if not isinstance(g, dict):
            raise InputError("'grid' must be an object")
        return make_grid(manifold, L=g.get("L"), N=g.get("N"))


def test_function(spec, t_max: float) -> TestFunction:
    """Build a TestFunction from its JSON description."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise InputError("test function spec needs a 'kind'")
    kind = spec["kind"]
    if kind == "indicator":
        return TestFunction.indicator(float(spec.get("a", 0.0)), float(spec["b"]), t_max,
                                      complex(spec.get("value", 1.0)))
    if kind == "constant":
        return TestFunction.constant(complex(spec.get("value", 1.0)), t_max)
    if kind == "samples":
        times = np.asarray(spec["times"], dtype=float)
        re = np.asarray(spec["re"], dtype=float)
        im = np.asarray(spec.get("im", np.zeros_like(re)), dtype=float)
        if times[-1] != t_max:
            raise InputError("sample times must end at the time window")
        return TestFunction.from_samples(times, re + 1j * im)
    raise InputError(f"unknown test function kind {kind!r}")


# -- verify -------------------------------------------------------------------------

def _coth_pair(name, a, b):
    return name == "iso31" and (a.startswith("Q") or b.startswith("Q"))


def _verify_structure(ctx, report, spec):
    st = check_structure(spec)
    bad = (len(st.antisymmetry_violations) + len(st.undeclared) + len(st.involution_violations)
           + len(st.definition_violations) + len(st.central_violations) + len(st.jacobi_failures))
    report.check(f"structure {spec.name}", float(bad) + float(st.max_jacobi_residual), ctx.tol("structure"),
                 f"{st.triples_checked} triples")


def _verify_commutators(ctx, report, rep):
    spec = rep.algebra
    pairs = list(itertools.combinations(spec.base_names(), 2))
    probes = probe_set(rep)
    res = commutator_residuals(rep, pairs, probes)
    for (a, b), r in res.items():
        fam = "commutator_coth" if _coth_pair(rep.name, a, b) else "commutator"
        report.check(f"commutator [{a},{b}]", r, ctx.tol(fam))
    conv = ctx.get("convergence")
    if conv:
        sel = [tuple(p) for p in conv["pairs"]] if isinstance(conv, dict) else pairs
        fine = build_representation(rep.name, rep.grid.refined(2, axes=(0,)))
        res2 = commutator_residuals(fine, sel, probe_set(fine))
        for p in sel:
            r1, r2 = res[p] if p in res else commutator_residuals(rep, [p], probes)[p], res2[p]
            order = math.inf if r2 <= CONVERGENCE_FLOOR else math.log2(r1 / r2)
            report.check(f"convergence order [{p[0]},{p[1]}]", order, ctx.tol("convergence_order"),
                         f"{r1:.2e} -> {r2:.2e}", mode="ge")


def _wf_norm(rep, values):
    return float(WaveFunction(rep.grid, values).norm())


def _verify_heisenberg(ctx, report, rep):
    for k, v in fock.ccr_check(rep).items():
        report.check(f"ccr {k}", v, ctx.tol("vacuum" if k.startswith("a ") else "commutator"))
    T = 3.0
    rng = np.random.default_rng(int(ctx.get("seed", 7)))
    times = np.linspace(0.0, T, 7)
    f = TestFunction.from_samples(times, rng.normal(size=7) + 1j * rng.normal(size=7))
    g = TestFunction.from_samples(times, rng.normal(size=7) + 1j * rng.normal(size=7))
    for kind in ("Adag", "Lambda"):
        closed = fock.fundamental_matrix_element(kind, 1.3, f, g)
        report.check(f"fock {kind} closed form vs finite difference",
                     abs(closed - fock.fd_matrix_element(kind, 1.3, f, g)) / abs(closed), ctx.tol("fd_oracle"))
    a, b = TestFunction.indicator(0, 1, T), TestFunction.indicator(0, 2, T)
    value, bound = fock.fock_sum(a, b)
    report.check("fock exp_inner vs Fock sum", max(0.0, abs(fock.exp_inner(a, b) - value) - bound),
                 ctx.tol("fock_sum"), f"tail bound {bound:.1e}")
    labels = [TestFunction.from_samples(times, rng.normal(size=7) * 0.5 + 0.5j * rng.normal(size=7))
              for _ in range(5)]
    eig = np.linalg.eigvalsh(fock.gram_matrix(labels))
    report.check("fock Gram matrix min eigenvalue", min(0.0, float(eig.min())), ctx.tol("gram"))
    table = derive_ito_table(rep.algebra)
    for (x, y), r in fock.weak_ito_check(table, f, g, 1.0).items():
        report.check(f"weak ito d{x} d{y} deviation slope", min(r["slopes"]), ctx.tol("ito_slope"), mode="ge")
        report.check(f"weak ito d{x} d{y} Richardson limit", abs(r["richardson"]), ctx.tol("ito_richardson"))


def _verify_iso11(ctx, report, rep):
    k0, k1 = bessel_k(0, 2.0), bessel_k(1, 2.0)
    psi = vacuum_state(rep)
    report.check("vacuum ||A- psi0||", _wf_norm(rep, rep.apply("Am", psi.values)), ctx.tol("vacuum"))
    mu = rep.grid.axes[0]
    norm = math.fsum(rep.grid.axis_weights[0] * np.exp(-2.0 * np.cosh(mu)))
    report.check("normalization 2 K0(2)", abs(norm - 2.0 * float(bessel_k_series(0, 2.0))), ctx.tol("normalization"))
    report.check("<I> = K1/K0", abs(vacuum_expectation(rep, "I") - k1 / k0), ctx.tol("expectation"))
    qq = vacuum_expectation(rep, OperatorExpr.word(["Q", "Q"]))
    report.values["iso11 <Q^2>"] = qq.real
    report.check("<Q^2> = K1/(2 K0)", abs(qq - k1 / (2 * k0)), ctx.tol("expectation"))
    _bessel_checks(ctx, report)
    _smeared_checks(ctx, report, rep, ("Am", "Ap", "I"))


def _bessel_checks(ctx, report):
    worst, rec = 0.0, 0.0
    for n in range(9):
        for x in (0.05, 0.3, 1.0, 2.0, 5.0, 12.0, 30.0):
            a, b = bessel_k(n, x), float(bessel_k_series(n, x))
            worst = max(worst, abs(a - b) / abs(b))
            if n >= 1:
                lhs = bessel_k(n + 1, x)
                rhs = bessel_k(n - 1, x) + 2.0 * n / x * bessel_k(n, x)
                rec = max(rec, abs(lhs - rhs) / abs(lhs))
    report.values["K0(2)"] = bessel_k(0, 2.0)
    report.values["K1(2)"] = bessel_k(1, 2.0)
    report.check("bessel integral vs series", worst, ctx.tol("bessel"))
    report.check("bessel recurrence", rec, ctx.tol("bessel"))


def _smeared_checks(ctx, report, rep, names):
    T = 2.0
    rng = np.random.default_rng(int(ctx.get("seed", 7)))
    times = np.linspace(0.0, T, 9)
    f = TestFunction.from_samples(times, rng.normal(size=9))
    g = TestFunction.from_samples(times, rng.normal(size=9) + 1j * rng.normal(size=9))
    vec = process.ProductVector(probe_set(rep)[3], TestFunction.from_samples(times, rng.normal(size=9)))
    for a, b in itertools.combinations(names, 2):
        r = process.smeared_bracket_residual(rep, process.SmearedOperator(a, f), process.SmearedOperator(b, g), vec)
        coth = rep.name == "iso31" and (a.startswith("A") or b.startswith("A"))
        report.check(f"smeared [{a}(f),{b}(g)]", r, ctx.tol("commutator_coth" if coth else "smeared"))


def _verify_iso31(ctx, report, rep):
    psi = vacuum_state(rep)
    for i in (1, 2, 3):
        report.check(f"vacuum ||A-{i} psi0||", _wf_norm(rep, rep.apply(f"Am{i}", psi.values)), ctx.tol("vacuum"))
    mu = rep.grid.axes[0]
    radial = math.fsum(rep.grid.axis_weights[0] * np.exp(-2.0 * np.cosh(mu)))
    sphere = float(np.sum(np.multiply.outer(rep.grid.axis_weights[1], rep.grid.axis_weights[2])))
    report.check("normalization 8 pi K0(2)", abs(radial * sphere - 8 * math.pi * float(bessel_k_series(0, 2.0))),
                 ctx.tol("normalization"))
    lhs, rhs = process.rotation_relation(rep, 0.7, 0.4)
    report.check("rotation relation", max(abs(lhs - rhs), abs(lhs)), ctx.tol("rotation"))
    names = ("Am1", "Ap1", "Am2", "Ap2", "I", "M12")
    _smeared_checks(ctx, report, rep, names)


def _verify_iso21(ctx, report, rep):
    phi = type2.gaussian_phi(rep)
    m = type2.ModeState(3, phi)
    r = type2.mode_apply(rep, "T", m).values - 3 * m.full(rep).values
    report.check("T eigenmode n=3", float(np.max(np.abs(r))), ctx.tol("eigen"))


def run_verify(ctx: Context, report: RunReport, out: Path):
    spec, name = ctx.algebra()
    _verify_structure(ctx, report, spec)
    if name is None:
        return
    rep = build_representation(name, ctx.grid(MANIFOLD_OF[name]))
    _verify_commutators(ctx, report, rep)
    {"heisenberg": _verify_heisenberg, "iso11": _verify_iso11,
     "iso31": _verify_iso31, "iso21": _verify_iso21}[name](ctx, report, rep)


# -- ito -----------------------------------------------------------------------------

def run_ito(ctx: Context, report: RunReport, out: Path):
    names = ctx.get("algebras")
    specs = []
    if names is None:
        specs.append(ctx.algebra())
    else:
        if not isinstance(names, list) or not names:
            raise InputError("'algebras' must be a non-empty list")
        for n in names:
            if n not in BUILTIN_NAMES:
                raise InputError(f"unknown algebra {n!r}")
            specs.append((builtin_algebra(n), n))
    fmt = ctx.get("format", "plain")
    for spec, _ in specs:
        table = derive_ito_table(spec)
        text = render_table(table, "plain")
        fname = f"ito_{spec.name}.txt"
        atomic_write(out / fname, text)
        report.outputs.append(fname)
        if fmt == "json":
            jname = f"ito_{spec.name}.json"
            atomic_write(out / jname, render_table(table, "json"))
            report.outputs.append(jname)
        back = table_from_json(render_table(table, "json"))
        report.check(f"ito {spec.name} JSON round trip", 0.0 if back == table else 1.0, ctx.tol("roundtrip"))
        report.values[f"ito {spec.name} entries"] = len(table.entries)
        report.values[f"ito {spec.name} residuals"] = len(table.residuals)


# -- charfunc ------------------------------------------------------------------------

def _sweep(ctx):
    sw = ctx.require("sweep")
    try:
        start, stop, step = float(sw["start"]), float(sw["stop"]), float(sw["step"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed sweep: {exc}") from exc
    if not step > 0 or stop < start:
        raise InputError("sweep needs step > 0 and stop >= start")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    us = [round(start + k * step, 12) for k in range(n)]
    us = [u for u in us if abs(u) < math.pi]
    if not us:
        raise InputError("sweep is empty after clipping to (-pi, pi)")
    return us


def run_charfunc(ctx: Context, report: RunReport, out: Path):
    _, name = ctx.algebra()
    us = _sweep(ctx)
    if name == "iso11":
        k0s = float(bessel_k_series(0, 2.0))
        rows, worst_dual, worst_overlap = [], 0.0, 0.0
        grid = ctx.grid("hyperbola")
        for u in us:
            cp, cs = process.charfunc_iso11_u(u, "paper"), process.charfunc_iso11_u(u, "shift")
            rows.append((u, cp, cs))
            worst_overlap = max(worst_overlap, abs(cs - process.overlap_iso11(u, grid)))
        for u in ctx.get("golden_u", [0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0]):
            cp = process.charfunc_iso11_u(u, "paper")
            series = float(bessel_k_series(0, 2.0 * math.cos(u / 2.0))) / k0s
            worst_dual = max(worst_dual, abs(cp - series))
            report.values[f"C_paper({u:+.2f})"] = cp
        report.check("charfunc paper vs series oracle", worst_dual, ctx.tol("charfunc"))
        report.check("charfunc shift vs overlap oracle", worst_overlap, ctx.tol("charfunc"))
        step = float(ctx.get("moment_step", 1e-3))
        k1, k0 = bessel_k(1, 2.0), bessel_k(0, 2.0)
        m_paper = process.moment_from_charfunc(lambda u: process.charfunc_iso11_u(u, "paper"), 2, step)
        m_shift = process.moment_from_charfunc(lambda u: process.charfunc_iso11_u(u, "shift"), 2, step, "shift")
        m1 = process.moment_from_charfunc(lambda u: process.charfunc_iso11_u(u, "paper"), 1, step)
        rep = build_representation("iso11", grid)
        qq = vacuum_expectation(rep, OperatorExpr.word(["Q", "Q"])).real
        report.values["moment2 paper"] = m_paper
        report.values["moment2 shift"] = m_shift
        report.check("moment order 1", m1, ctx.tol("moment"))
        report.check("moment order 2 vs K1/(2 K0)", m_paper - k1 / (2 * k0), ctx.tol("moment"))
        report.check("moment order 2 vs grid <Q^2>", m_paper - qq, ctx.tol("moment"))
        report.check("moment order 2 shift convention", m_shift - m_paper, ctx.tol("moment"))
        atomic_write(out / "charfunc_iso11.csv", csv_text(["u", "C"], [(u, cp) for u, cp, _ in rows]))
        atomic_write(out / "charfunc_iso11_shift.csv", csv_text(["u", "C"], [(u, cs) for u, _, cs in rows]))
        report.outputs += ["charfunc_iso11.csv", "charfunc_iso11_shift.csv"]
    elif name == "iso31":
        rows, worst = [], 0.0
        for u in us:
            c = [process.charfunc_iso31_u(i, u) for i in (1, 2, 3)]
            rows.append((u, *c))
            worst = max(worst, max(c) - min(c))
        report.check("charfunc iso31 isotropy", worst, ctx.tol("isotropy"))
        k1, k0 = bessel_k(1, 2.0), bessel_k(0, 2.0)
        u0 = float(ctx.get("small_u", 1e-2))
        coeff = (process.charfunc_iso31_u(3, u0) - 1.0) / u0 ** 2
        report.values["small-u coefficient"] = coeff
        report.check("small-u coefficient K1/(12 K0)", coeff - k1 / (12 * k0), ctx.tol("small_u"))
        for i in (1, 2, 3):
            m2 = process.moment_from_charfunc(lambda u: process.charfunc_iso31_u(i, u), 2, 1e-2)
            report.check(f"moment order 2 axis {i} vs K1/(6 K0)", m2 - k1 / (6 * k0), ctx.tol("moment"))
        atomic_write(out / "charfunc_iso31.csv", csv_text(["u", "C1", "C2", "C3"], rows))
        report.outputs.append("charfunc_iso31.csv")
    else:
        raise InputError(f"characteristic functionals are defined for iso11 and iso31, not {name}")


# -- integral -------------------------------------------------------------------------

def _vector(ctx, rep, spec, t_max):
    state = spec.get("state", "vacuum")
    if state == "vacuum":
        v = vacuum_state(rep)
    elif isinstance(state, dict) and state.get("kind") == "probe":
        v = probe_set(rep)[int(state["index"])]
    else:
        raise InputError(f"unknown state {state!r}")
    return process.ProductVector(v, test_function(spec["label"], t_max))


def run_integral(ctx: Context, report: RunReport, out: Path):
    _, name = ctx.algebra()
    rep = build_representation(name, ctx.grid(MANIFOLD_OF[name]))
    cases = ctx.require("cases")
    if not isinstance(cases, list) or not cases:
        raise InputError("'cases' must be a non-empty list")
    k0, k1 = bessel_k(0, 2.0), bessel_k(1, 2.0)
    for case in cases:
        try:
            label, t_max, t = case["name"], float(case["t_max"]), float(case["t"])
            p = case["process"]
            proc = process.SimpleProcess(p["breakpoints"], p.get("e0", [0] * (len(p["breakpoints"]) - 1)),
                                         _complex_list(p.get("eplus")) or [0] * (len(p["breakpoints"]) - 1),
                                         p.get("eminus", [0] * (len(p["breakpoints"]) - 1)))
            bra = _vector(ctx, rep, case["bra"], t_max)
            ket = _vector(ctx, rep, case["ket"], t_max)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed integral case: {exc}") from exc
        quad, tele = process.stochastic_integral_matrix_element(rep, proc, bra, ket, t,
                                                                direction=int(case.get("direction", 1)),
                                                                return_both=True)
        report.values[f"integral {label}"] = quad
        report.check(f"integral {label} telescoping vs quadrature", abs(quad - tele), ctx.tol("agreement"))
        expect = case.get("expect")
        if expect == "t K1/K0":
            report.check(f"integral {label} = t K1/K0", abs(quad - t * k1 / k0), ctx.tol("agreement"))
        elif expect == "zero":
            report.check(f"integral {label} vanishes", abs(quad), ctx.tol("vacuum_bra"))


def _complex_list(x):
    if x is None:
        return None
    return [complex(v[0], v[1]) if isinstance(v, list) else complex(v) for v in x]


# -- type2 ---------------------------------------------------------------------------------

def run_type2(ctx: Context, report: RunReport, out: Path):
    rep = build_representation("iso21", ctx.grid("cone"))
    horizon = int(ctx.get("horizon", 4))
    phi = type2.gaussian_phi(rep)
    observables = ctx.get("observables", [["T"], ["Q"], ["Q", "Q"], ["P", "P"], ["E", "E"], ["I"], ["P"]])
    table = {}
    for word in observables:
        key = "".join(word) if len(set(word)) > 1 or len(word) == 1 else f"{word[0]}^{len(word)}"
        total, per_mode = type2.type2_expectation(rep, type2.Type2Process(horizon, word, phi))
        table[key] = (total, per_mode)
        report.values[f"<{key}> horizon {horizon}"] = total
        report.check(f"<{key}> real", abs(total.imag), ctx.tol("eigen"))
        if len(word) == 2 and word[0] == word[1]:
            report.check(f"<{key}> non-negative", min(0.0, min(c.real for c in per_mode)), ctx.tol("eigen"))
        prev, _ = type2.type2_expectation(rep, type2.Type2Process(horizon - 1, word, phi)) if horizon else (0, 0)
        report.check(f"<{key}> horizon additivity", abs(total - prev - per_mode[-1]), ctx.tol("exact"))
        atomic_write(out / f"type2_{key}.csv",
                     csv_text(["n", "re", "im"], [(n, c.real, c.imag) for n, c in enumerate(per_mode)]))
        report.outputs.append(f"type2_{key}.csv")
    if "T" in table:
        report.check("<T> = t(t+1)/2", abs(table["T"][0] - horizon * (horizon + 1) / 2), ctx.tol("exact"))
    if "Q" in table:
        report.check("per-mode <Q> = 0", max(abs(c) for c in table["Q"][1]), ctx.tol("eigen"))
    if "Q^2" in table:
        report.check("<Q^2>_0 = 3/8", abs(table["Q^2"][1][0] - 0.375), ctx.tol("type2"))
    if "P^2" in table:
        report.check("<P^2>_n = 1/2", max(abs(c - 0.5) for c in table["P^2"][1]), ctx.tol("type2"))
    for n1, n2 in ctx.get("orthogonality", [[0, 1], [2, 5]]):
        report.check(f"mode orthogonality ({n1},{n2})", abs(type2.mode_orthogonality_check(rep, n1, n2, phi)),
                     ctx.tol("orthogonality"))
    atomic_write(out / "type2.json", json.dumps(
        {k: {"total": [v[0].real, v[0].imag], "per_mode": [[c.real, c.imag] for c in v[1]]}
         for k, v in sorted(table.items())}, indent=2, sort_keys=True) + "\n")
    report.outputs.append("type2.json")


RUNNERS = {"verify": run_verify, "ito": run_ito, "charfunc": run_charfunc,
           "integral": run_integral, "type2": run_type2}


def run_scenario(command: str, config: dict, base_dir: Path, out: Path, name: str) -> RunReport:
    if command not in RUNNERS:
        raise InputError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    declared = config.get("command", command) if isinstance(config, dict) else command
    if declared != command:
        raise InputError(f"config is for command {declared!r}, not {command!r}")
    ctx = Context(config, base_dir)
    report = RunReport(name, command)
    RUNNERS[command](ctx, report, out)
    atomic_write(out / "values.json", json.dumps(
        {k: ([v.real, v.imag] if isinstance(v, complex) else v) for k, v in sorted(report.values.items())},
        indent=2, sort_keys=True) + "\n")
    report.outputs.append("values.json")
    return report


__all__ = ["COMMANDS", "TOLERANCES", "run_scenario", "test_function"]
