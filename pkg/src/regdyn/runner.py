"""Suite orchestration: turns a RunConfig into RunResults."""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from . import alpha_sets, dynamics, models
from .config import RunConfig
from .errors import ConfigError, CriterionNotApplicable, NotReachable, RegDynError, ZeroOperator
from .hamiltonians import LatticeConfig
from .report import RunResults, membership_row
from .seminorms import Verdict, combine, op_norm
from .spectral import sigma_minus, sigma_plus


def build_model(cfg: RunConfig):
    """(bundle, cutoffs) for the configured preset."""
    if cfg.model == "fermion_lattice":
        lat = LatticeConfig(cfg.sites, tuple(cfg.fields), cfg.hopping, cfg.interaction, cfg.pairing)
        bundle = models.fermion_lattice(cfg.sites, lat, cfg.j0)
        cutoffs = list(cfg.cutoffs) or list(range(cfg.sites))
    else:
        cutoffs = list(cfg.cutoffs) or list(range(41))
        cfg_c = cfg if cfg.cutoffs else replace(cfg, cutoffs=tuple(cutoffs))
        D = cfg_c.level_count()
        h_rule = "counterexample" if cfg.model == "counterexample" else cfg.h_rule
        if cfg.model == "rotated":
            bundle = models.rotated_example(D, h_rule, cfg.layers, cfg.angle, cfg.regime,
                                            (cfg.spectrum, cfg.spectrum_params()), cfg.h_param)
        else:
            if cfg.spectrum != "shifted_integer" or cfg.spectrum_params() != (1.0,):
                raise ConfigError("the bosonic model fixes spectrum = shifted_integer with shift 1")
            bundle = models.bosonic_example(D, h_rule, cfg.h_param)
    bad = [L for L in cutoffs if not 0 <= L <= bundle.fam.max_cutoff]
    if bad:
        raise ConfigError(f"cutoffs {bad} outside 0..{bundle.fam.max_cutoff}")
    if len(set(cutoffs)) < cfg.window + 2:
        raise ConfigError(f"need at least window+2 = {cfg.window + 2} distinct cutoffs")
    return bundle, sorted(set(cutoffs))


def operators(cfg: RunConfig, bundle, rng):
    """[(id, matrix)] from the ``operator`` entries."""
    out = []
    for entry in cfg.operators:
        if entry.startswith("random"):
            count = int(entry.split(":", 1)[1]) if ":" in entry else 1
            for i in range(count):
                out.append((f"random_{i}", models.random_regular_operator(bundle.spec, rng)))
        elif entry == "identity":
            out.append(("identity", np.eye(bundle.spec.ambient_dim)))
        elif entry in bundle.observables:
            out.append((entry, bundle.observables[entry]))
        else:
            raise ConfigError(f"unknown operator {entry!r}; model has "
                              f"{sorted(bundle.observables)} plus random:K and identity")
    if not out:
        raise ConfigError("no operators configured")
    return out


# ------------------------------------------------------------------ suites

def suite_evolve(cfg, bundle, cutoffs, ops, res: RunResults):
    fam, specs = bundle.fam, cfg.seminorm_specs()
    kw = dict(pairing=cfg.pairing_mode, tol=cfg.cauchy_tol, window=cfg.window)
    H = dynamics.hamiltonian_profile(fam, cutoffs, specs, **kw)
    for r in H:
        res.add_report("evolve/H", r)
    res.add_verdict("evolve", combine("HSEQ", H, detail="H_L sequence"))
    oid, X = ops[0]
    for t in cfg.times:
        tag = f"evolve@t={t:g}"
        rep, rows = dynamics.unitary_cauchy(fam, cfg.n, t, cutoffs, **kw)
        res.add_report(tag + "/tail_bound", rep)
        worst = max(rows, key=lambda r: r.exact / r.tail_bound if r.tail_bound else 0.0)
        ok = all(r.within_bound for r in rows)
        has_bound = worst.tail_bound is not None
        res.add_verdict(tag, Verdict(
            "P1.1", rep.verdict, (worst.L, worst.M), worst.exact, has_bound, ok,
            f"bound {worst.tail_bound:.6g}" if has_bound else "no closed-form bound for this kind"))
        suite = dynamics.alpha_limit_suite(dynamics.EvolutionRequest(
            fam, X, t, cutoffs, specs, cfg.n, cfg.pairing_mode, cfg.cauchy_tol, cfg.window))
        for r in suite.gate:
            res.add_report(tag + "/weighted_U", r)
        for r in suite.U:
            res.add_report(tag + "/U", r)
        for r in suite.alpha:
            res.add_report(tag + f"/alpha[{oid}]", r)
        for f in suite.factorization:
            res.profiles[f"{tag}/factorization[{oid}]_{f.label}"] = list(zip(f.cutoffs, f.residuals))
        for v in suite.verdicts:
            res.add_verdict(tag, v)


def suite_certify(cfg, bundle, cutoffs, ops, res: RunResults):
    fam = bundle.fam
    kw = dict(pairing=cfg.pairing_mode, tol=cfg.cauchy_tol, window=cfg.window)
    out = dynamics.sufficient_conditions(fam, cfg.n, cutoffs, cfg.times, cfg.taus, **kw)
    res.add_report("certify/weighted_H", out["weighted_H"])
    for r in out["series"]:
        res.add_report("certify/sc3", r)
    res.profiles["certify/alpha_U"] = list(zip(cutoffs, out["alpha_U"]))
    res.profiles["certify/alpha_TU"] = list(zip(cutoffs, out["alpha_TU"]))
    for v in out["verdicts"]:
        res.add_verdict("certify", v)
    for t in cfg.times:
        res.add_verdict(f"certify@t={t:g}", dynamics.regularizing_gate(
            fam, cfg.n, t, cutoffs, max(cfg.k_max, 1), cfg.cauchy_tol, cfg.window))


def suite_membership(cfg, bundle, cutoffs, ops, res: RunResults):
    spec = bundle.spec
    top = spec.level_count - 1
    full_bound = sigma_plus(spec, top) * sigma_minus(spec, top)
    criteria = bundle.extras.get("criteria", {})
    for oid, X in ops:
        try:
            rec = alpha_sets.membership(X, spec, cfg.n_max, oid)
        except ZeroOperator:
            continue
        bound, passed = full_bound, rec.alpha_star <= full_bound * (1 + 1e-12)
        if oid in criteria:
            try:
                cr = alpha_sets.commutator_criterion(X, criteria[oid], spec)
                bound, passed = cr.alpha_hat, cr.passed
                res.add_verdict("membership", Verdict(
                    "L1", "pass" if cr.passed else "fail", (oid,), cr.residual, True, cr.passed,
                    f"[X,S]=BX alpha_hat {cr.alpha_hat:.6g} beta_hat {cr.beta_hat:.6g} "
                    f"(with S^2: {cr.beta_hat_s2:.6g})"))
            except CriterionNotApplicable as exc:
                res.add_verdict("membership", Verdict(
                    "L1", "inconclusive", (oid,), exc.result.residual, detail="criterion n/a"))
        res.membership.append(membership_row(rec, cfg.n_max, bound, passed))
        if not passed:
            res.add_verdict("membership", Verdict("L1", "fail", (oid,), rec.alpha_star, True,
                                                  False, f"alpha_star above bound {bound:.6g}"))

    ratio_ok, worst = True, (None, 0.0)
    for oid, X in ops:
        for L in [c for c in cutoffs if c <= top]:
            r = alpha_sets.ratio_suite(X, L, spec, cfg.n_max)
            ratio_ok &= r.passed
            ratio = r.alpha_star / r.bound
            if ratio >= worst[1]:
                worst = ((oid, L), ratio)
    res.add_verdict("membership", Verdict("L1", "pass" if ratio_ok else "fail", worst[0],
                                          worst[1], True, ratio_ok, "alpha_star(X_L)/beta"))

    for sn in cfg.seminorm_specs():
        if sn.k is None:
            continue
        for oid, X in ops:
            try:
                L0, beta, r = alpha_sets.density_approximant(
                    X, cfg.density_eps, sn.f, sn.k, spec, exact_space=cfg.model == "fermion_lattice")
                v = Verdict("COR_DENS", "pass", (oid, L0), r, True, True,
                            f"{sn.label()} beta {beta:.6g}")
            except NotReachable as exc:
                v = Verdict("COR_DENS", "fail", (oid, exc.best_level), exc.best_residual, True,
                            False, f"{sn.label()} not reachable")
            res.add_verdict("membership", v)


def suite_gibbs(cfg, bundle, cutoffs, ops, res: RunResults):
    for beta in cfg.betas:
        g = dynamics.gibbs_suite(dynamics.GibbsRequest(
            bundle.fam, beta, cutoffs, cfg.seminorm_specs(), cfg.trace_mode, cfg.pairing_mode,
            cfg.cauchy_tol, cfg.window))
        for r in g.reports:
            res.add_report(f"gibbs@beta={beta:g}", r)
        for v in g.verdicts:
            res.add_verdict(f"gibbs@beta={beta:g}", v)


def suite_taylor(cfg, bundle, cutoffs, ops, res: RunResults):
    fam = bundle.fam
    top = cutoffs[-1]
    M = min(top, bundle.spec.level_count - 1)
    for oid, X in ops:
        for t in cfg.times:
            rows, _ = dynamics.taylor_profile(fam, top, M, X, t, cfg.taylor_order)
            ok = all(r.within_bound for r in rows)
            last = rows[-1]
            name = f"taylor@t={t:g}[{oid}]"
            res.profiles[name] = [(r.N, r.residual) for r in rows]
            res.add_verdict(name, Verdict("EQ37", "pass" if ok else "fail", (top, M, last.N),
                                          last.residual, True, ok, f"bound {last.bound:.6g}"))


def suite_dyson(cfg, bundle, cutoffs, ops, res: RunResults):
    fam = bundle.fam
    pairs = [(cutoffs[-2], cutoffs[-1]), (cutoffs[0], cutoffs[-1])]
    for t in cfg.times:
        for L, M in pairs:
            _, err = dynamics.dyson_difference(fam, L, M, t, cfg.panels)
            norm_H = max(op_norm(fam.hamiltonian(L)), op_norm(fam.hamiltonian(M)))
            regime = norm_H <= 5 and abs(t) <= 1 and cfg.panels >= 200
            ok = err <= 1e-8
            order, errs = dynamics.dyson_order(fam, L, M, t) if err > 0 else (np.inf, [])
            name = f"dyson@t={t:g}[{L},{M}]"
            res.profiles[name] = list(zip((8, 16, 32, 64), errs))
            res.add_verdict(name, Verdict(
                "EQ45", "pass" if ok else "fail", (L, M), err, regime, ok or not regime,
                f"order {order:.3f} |H| {norm_H:.3g}" + ("" if regime else " outside |H|<=5, |t|<=1")))


def suite_triple(cfg, bundle, cutoffs, ops, res: RunResults):
    fam = bundle.fam
    oid, X = ops[0]
    Ns = sorted({0, 1, 2, 5, 10, 20, cfg.taylor_order})
    Ms = [c for c in cutoffs if c < bundle.spec.level_count]
    for t in cfg.times:
        run = dynamics.triple_limit_run(fam, X, t, Ns, Ms, cutoffs)
        name = f"triple@t={t:g}[{oid}]"
        for stage in ("inner", "middle", "outer", "composite", "wrong_order"):
            res.profiles[f"{name}_{stage}"] = getattr(run, stage)
        final = run.composite[-1][1]
        outcome = "holds" if final < cfg.cauchy_tol else "inconclusive"
        wrong = run.wrong_order[-1][1]
        res.add_verdict(name, Verdict("EQ38", outcome, (cutoffs[-1],), final,
                                      detail=f"wrong order final {wrong:.6g}"))


SUITE_FUNCS = {
    "evolve": suite_evolve,
    "certify": suite_certify,
    "membership": suite_membership,
    "gibbs": suite_gibbs,
    "taylor": suite_taylor,
    "dyson": suite_dyson,
    "triple": suite_triple,
}


def run_config(cfg: RunConfig, suites, tag="") -> RunResults:
    """Run the named suites on one configuration; ``tag`` prefixes suite names."""
    if not suites:
        raise ConfigError("nothing to run")
    try:
        bundle, cutoffs = build_model(cfg)
    except ConfigError:
        raise
    except RegDynError as exc:
        raise ConfigError(str(exc)) from None
    rng = np.random.default_rng(cfg.seed)
    ops = operators(cfg, bundle, rng)
    res = RunResults()
    for name in suites:
        part = RunResults()
        SUITE_FUNCS[name](cfg, bundle, cutoffs, ops, part)
        if tag:
            part = _retag(part, tag)
        res.extend(part)
    return res


def _retag(part: RunResults, tag) -> RunResults:
    out = RunResults()
    out.summary = [[f"[{tag}]{row[0]}"] + row[1:] for row in part.summary]
    out.verdicts = [(f"[{tag}]{s}", v) for s, v in part.verdicts]
    out.membership = [[f"[{tag}]{row[0]}"] + row[1:] for row in part.membership]
    out.profiles = {f"[{tag}]{k}": v for k, v in part.profiles.items()}
    return out
