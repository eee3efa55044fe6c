"""Verification campaigns over random ensembles.

A campaign runs named suites over a ``(p, algebra, trial)`` grid.  Every
trial draws its inputs from its own PCG64 stream seeded with
``seed ^ suite_hash ^ trial`` where ``suite_hash`` is the first 63 bits of
``sha256("suite|p|algebra label")``, so any single instance can be
regenerated without running the others.
"""

from __future__ import annotations

import csv
import hashlib
import io as _io
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .algebra import BlockAlgebra, op_norm
from .ensembles import (
    gen_commuting_positive,
    gen_general,
    gen_hermitian,
    gen_invertible_hermitian,
    gen_order_pair,
    gen_psd,
    gen_symmetry,
    gen_unitary,
)
from .errors import ConfigError, SuiteUnknown
from .fredholm import (
    ModuleSpec,
    check_corollary04,
    chern_cyclicity_residual,
    conjugation_residual,
    phi_affine_image,
    phi_identity_residual,
    sgn_phi_residual,
    summability_profile,
)
from .inequalities import (
    LIPSCHITZ_FAMILY,
    MONOTONE_FAMILY,
    derived_constants,
    verify_25,
    verify_A2,
    verify_bks,
    verify_corA1,
    verify_lemmaA1,
    verify_prop02,
    verify_thm03i,
    verify_thm03ii,
)
from .io import dumps
from .quadrature import QuadratureSpec
from .reports import SLACK, Instance, identity_report, with_slack
from .schur import (
    ConstantEstimate,
    corner_identities,
    dilation_residual,
    estimate_Kp,
    verify_prop21,
    verify_prop22,
)
from .specflow import eta_potential, integral_sf_bounded, integral_sf_unbounded, linear_path

__all__ = [
    "CampaignConfig",
    "ReportBundle",
    "SUITES",
    "run_suite",
    "replay",
    "regenerate",
    "load_config",
    "default_config",
    "trial_rng",
    "suite_hash",
]

DEFAULT_TOLERANCES = {"identity": 1e-9, "slack": SLACK, "quadrature": 1e-8}
DEFAULT_KP = {"dims": [8], "trials": 200, "seed": 7}


# -- configuration -----------------------------------------------------------------


def _schema():
    return json.loads(resources.files("lpflow.data").joinpath("config_schema.json").read_text())


@dataclass(frozen=True)
class CampaignConfig:
    suites: tuple
    p_values: tuple
    algebras: tuple
    trials: int
    seed: int
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    kp: dict = field(default_factory=lambda: dict(DEFAULT_KP))
    suite_trials: dict = field(default_factory=dict)
    archive_cap: int = 100
    output_dir: str | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        for s in self.suites:
            if s not in SUITES:
                raise SuiteUnknown(s)
        for p in self.p_values:
            if not p >= 1:
                raise ConfigError(f"p values must be >= 1, got {p}")
        object.__setattr__(self, "suites", tuple(self.suites))
        object.__setattr__(self, "p_values", tuple(float(p) for p in self.p_values))
        algs = tuple(a if isinstance(a, BlockAlgebra) else BlockAlgebra(a) for a in self.algebras)
        object.__setattr__(self, "algebras", algs)
        object.__setattr__(self, "tolerances", {**DEFAULT_TOLERANCES, **self.tolerances})
        object.__setattr__(self, "kp", {**DEFAULT_KP, **self.kp})

    @classmethod
    def from_json(cls, obj):
        try:
            jsonschema.validate(obj, _schema())
        except jsonschema.ValidationError as exc:
            raise ConfigError(f"invalid campaign config: {exc.message}") from exc
        algs = [[(b["size"], b.get("weight", 1.0)) for b in a] for a in obj["algebras"]]
        return cls(obj["suites"], obj["p_values"], algs, obj["trials"], obj["seed"],
                   obj.get("tolerances", {}), obj.get("kp", {}), obj.get("suite_trials", {}),
                   obj.get("archive_cap", 100), obj.get("output_dir"))

    def to_json(self):
        return {
            "suites": list(self.suites),
            "p_values": list(self.p_values),
            "algebras": [a.to_json() for a in self.algebras],
            "trials": self.trials,
            "suite_trials": dict(self.suite_trials),
            "seed": self.seed,
            "tolerances": dict(self.tolerances),
            "kp": dict(self.kp),
            "archive_cap": self.archive_cap,
            "output_dir": self.output_dir,
        }

    def trials_for(self, suite):
        return int(self.suite_trials.get(suite, self.trials))


def load_config(path):
    return CampaignConfig.from_json(json.loads(Path(path).read_text()))


def default_config(**overrides):
    obj = json.loads(resources.files("lpflow.data").joinpath("default_config.json").read_text())
    obj.update(overrides)
    return CampaignConfig.from_json(obj)


# -- seeding -----------------------------------------------------------------------


def suite_hash(suite, p, algebra: BlockAlgebra):
    key = f"{suite}|{'none' if p is None else repr(float(p))}|{algebra.label()}"
    return int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], "little") >> 1


def trial_rng(seed, suite, p, algebra, trial):
    return np.random.default_rng(seed ^ suite_hash(suite, p, algebra) ^ trial)


# -- suites ------------------------------------------------------------------------


def _loguniform(rng, lo, hi):
    return float(10.0 ** rng.uniform(np.log10(lo), np.log10(hi)))


def _draw_x(alg, rng):
    return gen_hermitian(alg, _loguniform(rng, 0.1, 10.0), rng)


def _draw_a(alg, rng):
    # log-uniform scale straddles ||a|| = 1, where max(||a||^{1/2}, ||a||) switches branch
    while True:
        a = gen_hermitian(alg, _loguniform(rng, 0.01, 10.0), rng)
        if op_norm(a) >= 1e-8:
            return a


@dataclass(frozen=True)
class Suite:
    """``draw(alg, rng, trial, ctx) -> (elements, params)``; ``check(inst, ctx) -> reports``.

    ``p_mode`` is ``open`` (``1 < p``), ``closed`` (``1 <= p``) or ``none``.
    """

    kind: str
    p_mode: str
    draw: object
    check: object
    needs_kp: bool = False


def _xyz(alg, rng, trial, ctx):
    x = _draw_x(alg, rng)
    return {"x": x, "y": gen_general(alg, _loguniform(rng, 0.1, 10.0), rng),
            "z": gen_commuting_positive(x, rng)}, {}


def _xhyz(alg, rng, trial, ctx):
    x = _draw_x(alg, rng)
    return {"x": x, "y": _draw_x(alg, rng), "z": gen_commuting_positive(x, rng)}, {}


def _xa(alg, rng, trial, ctx):
    return {"x": _draw_x(alg, rng), "a": _draw_a(alg, rng)}, {}


def _xaz(alg, rng, trial, ctx):
    x = _draw_x(alg, rng)
    return {"x": x, "a": _draw_a(alg, rng), "z": gen_commuting_positive(x, rng)}, {}


def _order(alg, rng, trial, ctx):
    x, y = gen_order_pair(alg, _loguniform(rng, 0.1, 10.0), rng)
    return {"x": x, "y": y}, {}


def _order_f(alg, rng, trial, ctx):
    el, _ = _order(alg, rng, trial, ctx)
    names = sorted(MONOTONE_FAMILY)
    return el, {"f": names[trial % len(names)]}


def _psd_pair(alg, rng, trial, ctx):
    return {"a": gen_psd(alg, _loguniform(rng, 0.1, 10.0), rng),
            "b": gen_psd(alg, _loguniform(rng, 0.1, 10.0), rng)}, {}


def _lipschitz(alg, rng, trial, ctx):
    x = _draw_x(alg, rng)
    names = sorted(LIPSCHITZ_FAMILY)
    return {"x": x, "a": _draw_a(alg, rng), "t": gen_commuting_positive(x, rng)}, \
        {"f": names[trial % len(names)]}


def _invertible(alg, rng, trial, ctx):
    return {"D0": gen_invertible_hermitian(alg, _loguniform(rng, 0.1, 10.0), rng)}, {}


def _module(alg, rng, trial, ctx):
    el, _ = _invertible(alg, rng, trial, ctx)
    for i in range(3):
        el[f"u{i}"] = gen_unitary(alg, rng)
    return el, {}


def _d0_a(alg, rng, trial, ctx):
    return {"D0": _draw_x(alg, rng), "A": _draw_a(alg, rng)}, {}


def _x_u(alg, rng, trial, ctx):
    return {"D0": _draw_x(alg, rng), "u": gen_unitary(alg, rng)}, {}


def _chern_tuple(alg, rng, trial, ctx):
    n = trial % 2
    el = {"F0": gen_symmetry(alg, rng)}
    for i in range(2 * n + 2):
        el[f"a{i}"] = gen_general(alg, 1.0, rng)
    return el, {"n": n}


def _path(alg, rng, trial, ctx):
    return {"D0": gen_hermitian(alg, 2.0, rng), "A": gen_hermitian(alg, 2.0, rng)}, \
        {"q": float(3 + trial % 3)}


def _E(inst):
    return inst.elements


def _kp(inst):
    return inst.params["Kp"]


def _tol(ctx, key):
    return ctx["tolerances"][key]


def _check_corners(inst, ctx):
    e = _E(inst)
    res = corner_identities(e["x"], e["y"], e["z"])
    return [identity_report(Instance(f"id_corners_{tag}", None, {}, e), r, _tol(ctx, "identity"))
            for tag, r in zip(("pp", "pq", "qp", "qq"), res)]


def _id(name, fn):
    def check(inst, ctx):
        return [identity_report(Instance(name, None, {}, _E(inst)), fn(_E(inst)), _tol(ctx, "identity"))]
    return check


def _check_prop32(inst, ctx):
    e = _E(inst)
    img = phi_affine_image(e["D0"], e["A"], 4.0)
    return [identity_report(Instance("id_prop32", None, {}, e), img.identity_residual,
                            _tol(ctx, "identity"), {"norm_p_phalf": img.norm})]


def _check_cor04(inst, ctx):
    e = _E(inst)
    us = [e[k] for k in sorted(e) if k.startswith("u")]
    m = ModuleSpec(e["D0"].algebra, e["D0"], inst.p, us)
    return check_corollary04(m, _kp(inst))


def _check_summability(inst, ctx):
    e = _E(inst)
    m = ModuleSpec(e["D0"].algebra, e["D0"], inst.p, [])
    prof = summability_profile(m)
    return [identity_report(Instance("summability", inst.p, {}, e), prof["diff"], 1e-10,
                            {"unbounded": prof["unbounded"], "bounded": prof["bounded"]})]


def _check_chern(inst, ctx):
    e = _E(inst)
    as_ = [e[f"a{i}"] for i in range(2 * int(inst.params["n"]) + 2)]
    return [identity_report(Instance("chern", None, dict(inst.params), e),
                            chern_cyclicity_residual(e["F0"], as_), _tol(ctx, "identity"))]


def _check_sf_exact(inst, ctx):
    e = _E(inst)
    path = linear_path(e["D0"], e["A"])
    res = integral_sf_unbounded(path, 2.0, QuadratureSpec(_tol(ctx, "quadrature")))
    exact = eta_potential(e["D0"] + e["A"], 2.0) - eta_potential(e["D0"], 2.0)
    return [identity_report(Instance("sf_exactness", None, {}, e), abs(res.numerator - exact), 1e-7,
                            {"result": res.to_json(), "eta_difference": exact})]


def _check_sf_consistency(inst, ctx):
    e = _E(inst)
    q = inst.params["q"]
    path = linear_path(e["D0"], e["A"])
    res = integral_sf_bounded(path, q, QuadratureSpec(_tol(ctx, "quadrature")), derivative="fd")
    return [identity_report(Instance("sf_consistency", None, dict(inst.params), e),
                            abs(res.consistency_delta), 1e-6, {"result": res.to_json()})]


SUITES = {
    "prop21": Suite("inequality", "open", _xyz,
                    lambda i, c: [verify_prop21(**_E(i), p=i.p, Kp=_kp(i))], True),
    "prop22": Suite("inequality", "open", _xhyz,
                    lambda i, c: [verify_prop22(**_E(i), p=i.p, Kp=_kp(i))], True),
    "thm03i": Suite("inequality", "open", _xa,
                    lambda i, c: list(verify_thm03i(**_E(i), p=i.p, Kp=_kp(i))), True),
    "thm03ii": Suite("inequality", "open", _xaz,
                     lambda i, c: [verify_thm03ii(**_E(i), p=i.p, Kp=_kp(i))], True),
    "eq25": Suite("inequality", "closed", _xa, lambda i, c: [verify_25(**_E(i), p=i.p)]),
    "A2": Suite("inequality", "closed", _xa, lambda i, c: [verify_A2(**_E(i), p=i.p)]),
    "lemmaA1": Suite("inequality", "closed", _order, lambda i, c: [verify_lemmaA1(**_E(i), p=i.p)]),
    "corA1": Suite("inequality", "closed", _order_f,
                   lambda i, c: [verify_corA1(**_E(i), f=i.params["f"], p=i.p)]),
    "bks": Suite("inequality", "closed", _psd_pair, lambda i, c: [verify_bks(**_E(i), p=i.p)]),
    "id_corners": Suite("identity", "none", _xyz, _check_corners),
    "id_dilation": Suite("identity", "none", _xhyz,
                         _id("id_dilation", lambda e: dilation_residual(e["x"], e["y"], e["z"]))),
    "id_phi": Suite("identity", "none", lambda a, r, t, c: ({"x": _draw_x(a, r)}, {}),
                    _id("id_phi", lambda e: phi_identity_residual(e["x"]))),
    "id_sgn_phi": Suite("identity", "none", _invertible,
                        _id("id_sgn_phi", lambda e: sgn_phi_residual(e["D0"]))),
    "id_prop32": Suite("identity", "none", _d0_a, _check_prop32),
    "id_conjugation": Suite("identity", "none", _x_u,
                            _id("id_conjugation", lambda e: conjugation_residual(e["D0"], e["u"]))),
    "cor04": Suite("fredholm", "open", _module, _check_cor04, True),
    "summability": Suite("fredholm", "open", _invertible, _check_summability),
    "chern": Suite("fredholm", "none", _chern_tuple, _check_chern),
    "sf_exactness": Suite("specflow", "none", _path, _check_sf_exact),
    "sf_consistency": Suite("specflow", "none", _path, _check_sf_consistency),
    "prop02": Suite("informational", "closed", _lipschitz,
                    lambda i, c: [verify_prop02(**_E(i), p=i.p, f=i.params["f"])]),
}


def _p_grid(suite, p_values):
    mode = SUITES[suite].p_mode
    if mode == "none":
        return [None]
    if mode == "open":
        return [p for p in p_values if p > 1.0]
    return list(p_values)


# -- campaign ----------------------------------------------------------------------


@dataclass
class ReportBundle:
    rows: list
    constants: list
    sf_results: list
    meta: dict
    failures: list = field(default_factory=list)

    @property
    def reports(self):
        return [r["report"] for r in self.rows]

    @property
    def all_pass(self):
        return all(r["report"].passed for r in self.rows if not r["informational"])

    def report_lines(self):
        """One canonical JSON document per report, in collector order."""
        out = []
        for r in self.rows:
            body = r["report"].to_json()
            body.update({"suite": r["suite"], "algebra": r["algebra"], "trial": r["trial"]})
            out.append(dumps(body))
        return out

    def summary(self):
        groups = {}
        for r in self.rows:
            rep = r["report"]
            key = (r["suite"], rep.name, rep.p, r["algebra"], r["dim"])
            groups.setdefault(key, []).append(rep)
        rows = []
        for (suite, name, p, label, dim), reps in groups.items():
            slack = [x.rhs + x.abs_tol - x.lhs for x in reps]
            rows.append({
                "suite": suite,
                "name": name,
                "p": "" if p is None else p,
                "algebra": label,
                "dim": dim,
                "trials": len(reps),
                "worst_margin": min(slack),
                "pass_rate": sum(x.passed for x in reps) / len(reps),
                "max_ratio": max(x.ratio for x in reps),
                "informational": SUITES[suite].kind == "informational",
            })
        return rows

    def summary_csv(self):
        buf = _io.StringIO()
        fields = ["suite", "name", "p", "algebra", "dim", "trials", "worst_margin",
                  "pass_rate", "max_ratio", "informational"]
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for row in self.summary():
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
        return buf.getvalue()

    def write(self, output_dir):
        out = Path(output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "reports.jsonl").write_text("\n".join(self.report_lines()) + "\n")
        (out / "summary.csv").write_text(self.summary_csv())
        (out / "constants.json").write_text(json.dumps([c.to_json() for c in self.constants], indent=1))
        (out / "meta.json").write_text(json.dumps(self.meta, indent=1, sort_keys=True))
        for f in self.failures:
            path = out / "failures" / f["suite"] / f"{f['digest']}.json"
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(dumps(f))
        return out


def _estimate_constants(config, needed):
    consts, kp = [], {}
    fixed = config.kp.get("values") or {}
    for p in needed:
        key = repr(p)
        if key in fixed or f"{p:g}" in fixed:
            v = float(fixed.get(key, fixed.get(f"{p:g}")))
            est = ConstantEstimate("K_p", p, v, 0, 0, {})
        else:
            est = estimate_Kp(p, config.kp["dims"], config.kp["trials"], config.kp["seed"])
        kp[p] = est.value
        consts.append(est)
        consts.extend(derived_constants(est))
    return consts, kp


def _threads():
    try:
        n = int(os.environ.get("SPECFLOW_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, min(n, os.cpu_count() or 1))


def _draw_instance(suite, p, alg, trial, seed, ctx, kp):
    s = SUITES[suite]
    rng = trial_rng(seed, suite, p, alg, trial)
    elements, params = s.draw(alg, rng, trial, ctx)
    if s.needs_kp:
        params = {**params, "Kp": kp[p]}
    return Instance(suite, p, params, elements)


def _stamp(reports, inst):
    # a trial's reports all point at the instance that was drawn, whatever name the verifier used
    return [replace(r, instance_digest=inst.digest) for r in reports]


def _run_trial(task):
    suite, p, alg, trial, seed, ctx, kp = task
    inst = _draw_instance(suite, p, alg, trial, seed, ctx, kp)
    reports = _stamp(SUITES[suite].check(inst, ctx), inst)
    slack = ctx["tolerances"]["slack"]
    if slack != SLACK:
        reports = [with_slack(r, slack) if r.abs_tol == SLACK else r for r in reports]
    return inst, reports


def run_suite(config: CampaignConfig, output_dir=None) -> ReportBundle:
    """Run every configured suite; write outputs when an output directory is set."""
    t0 = time.time()
    needed = sorted({p for s in config.suites if SUITES[s].needs_kp for p in _p_grid(s, config.p_values)})
    constants, kp = _estimate_constants(config, needed)
    ctx = {"tolerances": config.tolerances}
    tasks = [(s, p, alg, t, config.seed, ctx, kp)
             for s in config.suites
             for p in _p_grid(s, config.p_values)
             for alg in config.algebras
             for t in range(config.trials_for(s))]
    nthreads = _threads()
    if nthreads > 1:
        with ThreadPoolExecutor(nthreads) as pool:
            results = list(pool.map(_run_trial, tasks))
    else:
        results = [_run_trial(t) for t in tasks]

    rows, failures, sf_results, per_suite = [], [], [], {}
    for (suite, p, alg, trial, *_), (inst, reports) in zip(tasks, results):
        informational = SUITES[suite].kind == "informational"
        for rep in reports:
            rows.append({"suite": suite, "algebra": alg.label(), "dim": alg.dim, "trial": trial,
                         "report": rep, "informational": informational})
            if "result" in rep.details:
                sf_results.append(rep.details["result"])
        if not all(r.passed for r in reports) and per_suite.get(suite, 0) < config.archive_cap:
            per_suite[suite] = per_suite.get(suite, 0) + 1
            failures.append({"suite": suite, "trial": trial, "algebra": alg.label(),
                             "digest": inst.digest, "instance": inst.to_json(),
                             "reports": [r.to_json() for r in reports]})

    meta = {
        "version": _version(),
        "seed": config.seed,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "elapsed_s": round(time.time() - t0, 3),
        "threads": nthreads,
        "config": config.to_json(),
        "reports": len(rows),
        "failures": sum(not r["report"].passed for r in rows if not r["informational"]),
        "informational_failures": sum(not r["report"].passed for r in rows if r["informational"]),
    }
    bundle = ReportBundle(rows, constants, sf_results, meta, failures)
    meta["all_pass"] = bundle.all_pass
    target = output_dir or config.output_dir
    if target:
        bundle.write(target)
    return bundle


def regenerate(config: CampaignConfig, suite, p, algebra, trial, kp=None) -> Instance:
    """Redraw the instance behind one trial of a campaign, bit for bit.

    Passing trials are not archived; this is how their digests resolve.
    ``kp`` maps ``p`` to the ``K_p`` value used (estimated again when omitted).
    """
    if suite not in SUITES:
        raise SuiteUnknown(suite)
    alg = algebra if isinstance(algebra, BlockAlgebra) else BlockAlgebra(algebra)
    p = None if p is None else float(p)
    if kp is None and SUITES[suite].needs_kp:
        kp = _estimate_constants(config, [p])[1]
    return _draw_instance(suite, p, alg, int(trial), config.seed, {"tolerances": config.tolerances}, kp)


def replay(archived, tolerances=None):
    """Re-run an archived instance (a dict or a path to its JSON file)."""
    if not isinstance(archived, dict):
        archived = json.loads(Path(archived).read_text())
    inst = Instance.from_json(archived["instance"])
    suite = archived["suite"]
    if suite not in SUITES:
        raise SuiteUnknown(suite)
    ctx = {"tolerances": {**DEFAULT_TOLERANCES, **(tolerances or {})}}
    return _stamp(SUITES[suite].check(inst, ctx), inst)


def _version():
    from . import __version__
    return __version__
