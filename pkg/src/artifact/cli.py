"""Batch front-end: `artifact [--config F] [--seed N] [--out F] GROUP COMMAND [INPUT]`.

Inputs and the config are JSON documents validated against the schemas in
artifact/schemas/v1. Output is one JSON document with a header (config and
measured constants) and the command's result. Exit codes: 0 success,
2 precondition or schema failure, 3 precision exhausted, 1 when an algorithm
fails to converge.
"""

import json
import random
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources

import click
import jsonschema

from . import __version__
from .charp import (
    CharPElem, PrecisionWindow, analyticity_constant, frobenius, gamma_bound, mu_decompose,
    random_element, standard_samples,
)
from .cones import (
    Cone, Frame, Lattice, ToricMap, dual_cone, framed_graph, hilbert_basis, is_toric_refinement, tropicalize,
)
from .descent import (
    DescentFrame, deperfect_module, descend_matrix, fourier_decompose, fourier_loss, split_element,
    split_refinement,
)
from .errors import ArtifactError, PrecisionError, PreconditionError
from .gamma import GammaElem, act_period, check_equivariance, dgamma
from .numbers import from_str, to_str
from .phimod import (
    PhiModule, euler_characteristic, is_pure, koszul_cohomology, newton_slopes, trivialize, twist,
)
from .series import SeriesElem
from .suite import BATCHES, run_suite
from .wittperiod import (
    CycloElem, WittElem, approx_pth_root, imperfect_lift, measured_r0, pi_elem, teichmuller, theta_eval,
    z_elem,
)

SCHEMA_VERSION = "v1"
EXIT_OK, EXIT_FAILED, EXIT_PRECONDITION, EXIT_PRECISION = 0, 1, 2, 3


class SchemaViolation(PreconditionError):
    def __init__(self, pointer, message):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer or "/"


@lru_cache(maxsize=None)
def load_schema(name):
    path = resources.files("artifact") / "schemas" / SCHEMA_VERSION / f"{name}.json"
    return json.loads(path.read_text())


def validate(name, doc):
    validator = jsonschema.Draft202012Validator(load_schema(name))
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        pointer = "".join(f"/{part}" for part in e.absolute_path)
        raise SchemaViolation(pointer, e.message)


# ---------------------------------------------------------------------------
# configuration

@dataclass(frozen=True)
class RunConfig:
    p: int = 2
    q: int = 2
    witt_length: int = 2
    mden: int = 1
    pibar_lo: Fraction = Fraction(-4)
    pibar_hi: Fraction = Fraction(16)
    toric_bound: int = 4
    m: int = None
    frame: dict = field(default_factory=lambda: {"rank": 0})
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "pibar_lo", Fraction(self.pibar_lo))
        object.__setattr__(self, "pibar_hi", Fraction(self.pibar_hi))
        need = self.witt_length - 1 + self.mden
        if self.m is None:
            object.__setattr__(self, "m", need)
        elif self.m < need:
            raise PreconditionError(f"cyclotomic level m = {self.m} is below N - 1 + mden = {need}")
        if self.q % self.p:
            raise PreconditionError("q must be a power of p")

    @classmethod
    def from_json(cls, doc, seed=None):
        validate("config", doc)
        kw = dict(doc)
        for key in ("pibar_lo", "pibar_hi"):
            if key in kw:
                kw[key] = from_str(kw[key]) if isinstance(kw[key], str) else Fraction(kw[key])
        if seed is not None:
            kw["seed"] = seed
        return cls(**kw)

    def frame_obj(self):
        return Frame.from_json(self.frame)

    def window(self):
        f = self.frame_obj()
        return PrecisionWindow(self.p, self.q, self.mden, self.pibar_lo, self.pibar_hi, self.toric_bound, f.weight)

    def to_json(self):
        d = asdict(self)
        d["pibar_lo"], d["pibar_hi"] = to_str(self.pibar_lo), to_str(self.pibar_hi)
        return d


def measured_constants(cfg):
    """Analyticity constant c (log_p) and lift threshold r_0 on the config window."""
    w = cfg.window()
    out = {}
    try:
        out["log_p_c"] = to_str(analyticity_constant(w.p, standard_samples(w)))
    except ArtifactError:
        out["log_p_c"] = None
    try:
        out["r0"] = to_str(measured_r0(w))
    except ArtifactError:
        out["r0"] = None
    return out


# ---------------------------------------------------------------------------
# encoding helpers

def _window_of(cfg, doc):
    if doc.get("frame") is not None:
        return PrecisionWindow.from_json({"q": doc["frame"]["p"], **doc["frame"]})
    return cfg.window()


def _charp(doc, window):
    if "window" in doc:
        window = PrecisionWindow.from_json({"q": doc["window"]["p"], **doc["window"]})
    return CharPElem.from_json(doc, window)


def _matrix(rows, window):
    return [[_charp(x, window) for x in row] for row in rows]


def _enc_matrix(M):
    return [[x.to_json() for x in row] for row in M]


def _witt(doc, window):
    return WittElem([_charp(c, window) for c in doc["components"]])


def _frame(doc):
    return Frame.from_json(doc)


def _val(v):
    return to_str(v)


# ---------------------------------------------------------------------------
# handlers: (group, command) -> f(doc, cfg) -> JSON-able result

HANDLERS = {}


def handler(group, name):
    def register(fn):
        HANDLERS[(group, name)] = fn
        return fn
    return register


@handler("cone", "dual")
def _cone_dual(doc, cfg):
    c = doc["cone"]
    return dual_cone(Cone(Lattice(c["rank"]), tuple(tuple(g) for g in c["generators"]))).to_json()


@handler("cone", "hilbert")
def _cone_hilbert(doc, cfg):
    c = doc["cone"]
    mon = hilbert_basis(Cone(Lattice(c["rank"]), tuple(tuple(g) for g in c["generators"])))
    return {"hilbert_basis": [list(h) for h in sorted(mon.hilbert_basis)]}


@handler("cone", "refine")
def _cone_refine(doc, cfg):
    src, tgt = _frame(doc["source"]), _frame(doc["target"])
    m = ToricMap(Lattice(src.rank), Lattice(tgt.rank), doc["matrix"])
    flag, gens = is_toric_refinement(m, src, tgt)
    return {"is_refinement": flag, "complement": [list(g) for g in gens] if gens else []}


@handler("cone", "graph")
def _cone_graph(doc, cfg):
    frame, p1, p2 = framed_graph(_frame(doc["first"]), _frame(doc["second"]))
    return {"frame": frame.to_json(), "names": list(frame.coordinate_names),
            "projections": [[list(r) for r in p1.matrix], [list(r) for r in p2.matrix]]}


@handler("cone", "trop")
def _cone_trop(doc, cfg):
    return {"value": to_str(tropicalize(_frame(doc["frame"]), doc["vector"]))}


@handler("charp", "ops")
def _charp_ops(doc, cfg):
    w = cfg.window()
    x = _charp(doc["x"], w)
    op = doc["op"]
    if op == "inverse":
        return x.inverse().to_json()
    if op == "pow":
        return (x ** doc.get("n", 1)).to_json()
    if "y" not in doc:
        raise PreconditionError(f"operation {op} needs y")
    y = _charp(doc["y"], w)
    return {"add": x + y, "sub": x - y, "mul": x * y}[op].to_json()


@handler("charp", "frob")
def _charp_frob(doc, cfg):
    x = _charp(doc["x"], cfg.window())
    return frobenius(x, inverse=doc.get("inverse", False), times=doc.get("times", 1)).to_json()


@handler("charp", "mu")
def _charp_mu(doc, cfg):
    x = _charp(doc["x"], cfg.window())
    return [{"class": {"e": to_str(mu.e_class), "v": [to_str(t) for t in mu.toric_class]},
             "component": part.to_json()} for mu, part in sorted(mu_decompose(x).items())]


@handler("charp", "bound")
def _charp_bound(doc, cfg):
    w = cfg.window()
    n = doc.get("n", 2)
    samples = standard_samples(w)
    return {"n": n, "gamma_bound": _val(gamma_bound(n, samples)),
            "log_p_c": to_str(analyticity_constant(w.p, samples, n))}


@handler("witt", "ops")
def _witt_ops(doc, cfg):
    w = cfg.window()
    x, y = _witt(doc["x"], w), _witt(doc["y"], w)
    return {"add": x + y, "sub": x - y, "mul": x * y}[doc["op"]].to_json()


@handler("witt", "teich")
def _witt_teich(doc, cfg):
    return teichmuller(_charp(doc["x"], cfg.window()), doc.get("n", cfg.witt_length)).to_json()


@handler("witt", "theta")
def _witt_theta(doc, cfg):
    w, N = cfg.window(), cfg.witt_length
    if "special" in doc:
        x = (z_elem if doc["special"] == "z" else pi_elem)(w, N)
    elif "x" in doc:
        x = _witt(doc["x"], w)
    else:
        raise PreconditionError("theta needs x or special")
    return theta_eval(x, N).to_json()


@handler("witt", "special")
def _witt_special(doc, cfg):
    n = doc.get("n", cfg.witt_length)
    return (z_elem if doc["name"] == "z" else pi_elem)(cfg.window(), n).to_json()


@handler("witt", "lift")
def _witt_lift(doc, cfg):
    r = from_str(doc["r"]) if isinstance(doc["r"], str) else Fraction(doc["r"])
    return imperfect_lift(_charp(doc["x"], cfg.window()), r, doc.get("n", 2)).to_json()


@handler("witt", "root")
def _witt_root(doc, cfg):
    return approx_pth_root(CycloElem.from_json(doc["y"])).to_json()


@handler("gamma", "act")
def _gamma_act(doc, cfg):
    g = GammaElem.from_json(doc["g"])
    kind = doc.get("kind", "charp")
    w = cfg.window()
    if kind == "charp":
        validate("charp.mu", {"x": doc["x"]})
        x = _charp(doc["x"], w)
    elif kind == "witt":
        x = _witt(doc["x"], w)
    else:
        x = CycloElem.from_json(doc["x"])
    return act_period(g, x).to_json()


@handler("gamma", "compose")
def _gamma_compose(doc, cfg):
    g, h = GammaElem.from_json(doc["g"]), GammaElem.from_json(doc["h"])
    return g.compose(h, cfg.p).to_json()


@handler("gamma", "dgamma")
def _gamma_dgamma(doc, cfg):
    g = GammaElem.from_json(doc["g"])
    return dgamma(g, SeriesElem.from_json(doc["x"]), doc.get("order", 8)).to_json()


@handler("gamma", "equivariance")
def _gamma_equivariance(doc, cfg):
    rng = random.Random(cfg.seed)
    w = cfg.window()
    A = max(w.mden + 8, 8)
    mod = w.p ** A
    pairs = []
    for _ in range(doc.get("count", 20)):
        g0 = rng.randrange(1, mod)
        while g0 % w.p == 0:
            g0 = rng.randrange(1, mod)
        g = GammaElem(g0, tuple(rng.randrange(mod) for _ in range(w.rank)), A)
        pairs.append((g, random_element(w, rng, 3, max_pibar=min(w.pibar_hi, 4))))
    report = check_equivariance(pairs)
    return {k: (_val(v) if k != "count" else v) for k, v in report.items()}


def _module(doc):
    return PhiModule.from_json(doc["module"])


@handler("phim", "slopes")
def _phim_slopes(doc, cfg):
    return {"slopes": newton_slopes(_module(doc)).to_json()}


@handler("phim", "twist")
def _phim_twist(doc, cfg):
    return twist(_module(doc), doc["m"]).to_json()


@handler("phim", "trivialize")
def _phim_trivialize(doc, cfg):
    t = trivialize(_module(doc), doc.get("cap", 64))
    return {"k": t.k, "U": [[list(x) for x in row] for row in t.U],
            "ring": {"p": t.ring.p, "n": t.ring.n, "r": t.ring.r}}


@handler("phim", "cohomology")
def _phim_cohomology(doc, cfg):
    M = _module(doc)
    H = koszul_cohomology(M)
    return {"groups": [[str(d) for d in h] for h in H], "euler_characteristic": euler_characteristic(H, M.p)}


@handler("phim", "pure")
def _phim_pure(doc, cfg):
    return {"pure": is_pure(_module(doc), doc["c"], doc["d"])}


def _descent_frame(cfg, doc):
    if not cfg.frame_obj().boundary_free:
        raise PreconditionError("descent needs a boundary-free (Laurent) frame")
    return DescentFrame(_window_of(cfg, doc))


@handler("descend", "split")
def _descend_split(doc, cfg):
    frame = _descent_frame(cfg, doc)
    y, z = split_element(doc["i"], doc["h"], _charp(doc["x"], frame.window), frame)
    return {"y": y.to_json(), "z": z.to_json()}


@handler("descend", "matrix")
def _descend_matrix(doc, cfg):
    frame = _descent_frame(cfg, doc)
    tol = doc.get("tolerance")
    tol = None if tol is None else (from_str(tol) if isinstance(tol, str) else Fraction(tol))
    res = descend_matrix(_matrix(doc["matrix"], frame.window), doc["i"], doc["h"], tol, frame)
    return {"U": _enc_matrix(res.U), "residual": _enc_matrix(res.residual),
            "log": [[l, _val(v)] for l, v in res.log], "certified": res.certified, "loss": to_str(res.loss)}


@handler("descend", "module")
def _descend_module(doc, cfg):
    frame = _descent_frame(cfg, doc)
    w = frame.window
    out = deperfect_module(_matrix(doc["F"], w), [_matrix(g, w) for g in doc["gammas"]], frame)
    return {"F": _enc_matrix(out.F), "gammas": [_enc_matrix(g) for g in out.gammas], "U": _enc_matrix(out.U),
            "h_used": [list(x) for x in out.h_used], "passes": out.passes}


@handler("descend", "fourier")
def _descend_fourier(doc, cfg):
    x = CycloElem.from_json(doc["x"])
    comps = fourier_decompose(x, doc["m"])
    return {"components": [{"nu": list(c.nu), "value": c.value.to_json()} for c in comps],
            "loss_digits": fourier_loss(x, doc["m"])}


@handler("descend", "splitref")
def _descend_splitref(doc, cfg):
    return split_refinement(CycloElem.from_json(doc["x"])).to_json()


# ---------------------------------------------------------------------------
# driver

def execute(group, name, doc, cfg):
    """Validate, run and wrap one command; returns the output document."""
    validate(f"{group}.{name}", doc)
    result = HANDLERS[(group, name)](doc, cfg)
    return {"version": __version__, "schema": SCHEMA_VERSION, "command": f"{group} {name}",
            "config": cfg.to_json(), "constants": measured_constants(cfg), "result": result}


def exit_code_for(exc):
    if isinstance(exc, PrecisionError):
        return EXIT_PRECISION
    if isinstance(exc, PreconditionError):
        return EXIT_PRECONDITION
    return EXIT_FAILED


def _dump(doc):
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _emit(ctx, doc):
    out = ctx.obj["out"]
    text = _dump(doc)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _fail(exc):
    report = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, SchemaViolation):
        report["pointer"] = exc.pointer
    click.echo(_dump(report), err=True, nl=False)
    sys.exit(exit_code_for(exc))


def _run(ctx, group, name, input_file):
    try:
        doc = json.load(input_file) if input_file is not None else {}
    except json.JSONDecodeError as exc:
        _fail(SchemaViolation("/", f"invalid JSON: {exc}"))
    try:
        cfg = ctx.obj["config"]()
        _emit(ctx, execute(group, name, doc, cfg))
    except ArtifactError as exc:
        _fail(exc)


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="RunConfig JSON.")
@click.option("--seed", type=int, default=None, help="Seed for randomized commands (overrides the config).")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the output here.")
@click.version_option(__version__)
@click.pass_context
def main(ctx, config_path, seed, out):
    """Exact finite-precision computations for toric frames, period rings,
    Gamma actions, phi-modules and deperfection."""

    def load():
        if config_path:
            with open(config_path) as fh:
                try:
                    doc = json.load(fh)
                except json.JSONDecodeError as exc:
                    raise SchemaViolation("/", f"invalid JSON: {exc}")
        else:
            doc = {}
        return RunConfig.from_json(doc, seed)

    ctx.obj = {"config": load, "out": out}


def _make_group(group, names, help_text):
    grp = click.Group(group, help=help_text)
    for name in names:
        def callback(input_file, _name=name):
            _run(click.get_current_context(), group, _name, input_file)

        grp.add_command(click.Command(
            name, callback=callback,
            params=[click.Argument(["input_file"], type=click.File("r"), required=False)],
            help=f"Run `{group} {name}` on INPUT_FILE (JSON; '-' for stdin).",
        ))
    main.add_command(grp)


_make_group("cone", ["dual", "hilbert", "refine", "graph", "trop"], "Cones, monoids and frames.")
_make_group("charp", ["ops", "frob", "mu", "bound"], "The characteristic-p coefficient ring.")
_make_group("witt", ["ops", "teich", "theta", "special", "lift", "root"], "Witt vectors and theta.")
_make_group("gamma", ["act", "compose", "dgamma", "equivariance"], "The group Gamma and its actions.")
_make_group("phim", ["slopes", "twist", "trivialize", "cohomology", "pure"], "phi-modules.")
_make_group("descend", ["split", "matrix", "module", "fourier", "splitref"], "Deperfection and refinement.")


@main.command("suite")
@click.argument("which", type=click.Choice(["all", *BATCHES]), default="all")
@click.pass_context
def suite(ctx, which):
    """Run the seeded property batches; exit 1 if any check fails."""
    try:
        cfg = ctx.obj["config"]()
        reports = run_suite(which, cfg.seed)
    except ArtifactError as exc:
        _fail(exc)
    failures = sum(len(r.failures) for r in reports)
    _emit(ctx, {"version": __version__, "command": f"suite {which}", "config": cfg.to_json(),
                "constants": measured_constants(cfg), "result": {"batches": [r.to_json() for r in reports],
                                                                  "failures": failures}})
    sys.exit(EXIT_OK if failures == 0 else EXIT_FAILED)


if __name__ == "__main__":
    main()
