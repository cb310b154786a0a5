"""Named identity checks run on a content/style pair plus seeded random tensors.

Every check name below is registered in CHECKS with the invariant it tests.
Failures become report entries; nothing here raises on a failed identity.
"""

from __future__ import annotations

import warnings
from dataclasses import replace

import numpy as np

from fst import linalg
from fst.errors import FSTError
from fst.fft import fft2, naive_dft2
from fst.metrics import Check, VerificationReport, timing_probe
from fst.spectral import (
    center_shift,
    dft,
    idft,
    inverse_shift,
    spectral_content_loss,
    spectral_gram,
)
from fst.stylize import (
    METHODS,
    FrequencyWeight,
    apply_frequency,
    apply_spatial,
    build_transform,
    frequency_combine,
    linear_blend,
    phase_replace,
    verify_phase_preservation,
)
from fst.tensor import as_fmap, channel_stats, content_loss, gram_matrix

CHECKS: dict[str, str] = {
    "parseval": "sum of squares equals (1/HW) sum of squared amplitudes",
    "fft_vs_naive": "fast 2-D transform matches direct summation (sizes 1..16, 17, 31)",
    "idft_roundtrip": "inverse transform reproduces the source map",
    "content_loss_parseval": "spectral content loss equals spatial content loss",
    "gram_parseval": "Gram matrix from amplitude/phase equals spatial Gram matrix",
    "adain_phase_preservation": "AdaIN leaves the phase of non-zero frequencies unchanged",
    "wct_phase_disturbance": "WCT changes phase on generic multi-channel input",
    "adain_variance_alignment": "AdaIN output variances equal the style variances",
    "covariance_alignment_wct": "WCT output covariance equals the style covariance",
    "covariance_alignment_optimal": "OptimalWCT output covariance equals the style covariance",
    "optimal_wct_dominance": "OptimalWCT content loss never exceeds WCT content loss",
    "pr_content_loss_reduction": "phase replacement never increases content loss",
    "pr_amplitude_preservation": "phase replacement keeps Gram diagonals",
    "pr_real_output": "phase-replaced spectrum inverts to a real map",
    "fc_endpoints": "frequency combination hits stylized/content at alpha=1, 0 and sigma=1e9",
    "fc_linear_blend": "constant-weight combination equals the spatial linear blend",
    "gram_opt_convergence": "Gram-loss descent reaches 1e-6 relative objective when well-conditioned",
    "idempotence": "re-stylizing with the same style statistics is a no-op",
}
for _m in METHODS:
    CHECKS[f"domain_equivalence_{_m}"] = f"{_m}: frequency route equals spatial route"
    CHECKS[f"mean_alignment_{_m}"] = f"{_m}: output channel means equal the style means"

TINY = 1e-300


def _rel(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    scale = max(float(np.max(np.abs(b))), TINY)
    return float(np.max(np.abs(a - b))) / scale


def _mixed(rng, c, h, w) -> np.ndarray:
    mix = rng.standard_normal((c, c)) + 0.5 * np.eye(c)
    base = rng.standard_normal((c, h, w))
    return np.tensordot(mix, base, axes=1) + rng.standard_normal((c, 1, 1))


def well_conditioned(rng, c, h, w, lo=0.5, hi=2.0) -> np.ndarray:
    """Random map whose sample covariance is exactly a matrix with spectrum in [lo, hi]."""
    q, _ = np.linalg.qr(rng.standard_normal((c, c)))
    target = (q * rng.uniform(lo, hi, c)) @ q.T
    z = rng.standard_normal((c, h * w))
    z -= z.mean(axis=1, keepdims=True)
    z = np.linalg.solve(np.linalg.cholesky(z @ z.T / (h * w)), z)
    return (linalg.sqrt_psd(target) @ z).reshape(c, h, w) + rng.standard_normal((c, 1, 1))


def synthetic_pair(seed: int = 0, c: int = 3, h: int = 32, w: int = 32):
    rng = np.random.default_rng(seed)
    return _mixed(rng, c, h, w), _mixed(rng, c, h + 5, w - 3)


def covariance_check(name, out, stats_c, stats_s, method, cutoff) -> Check:
    rank = linalg.effective_rank(stats_c.cov, cutoff)
    full = rank == stats_c.channels
    if full:
        expected = stats_s.cov
        detail = "full-rank"
    else:
        proj = linalg.retained_projector(stats_c.cov, cutoff)
        if method == "wct":
            root = linalg.sqrt_psd(stats_s.cov)
            expected = root @ proj @ root
        else:
            expected = proj @ stats_s.cov @ proj
        detail = f"truncated-rank {rank}/{stats_c.channels}: compared in retained projector space"
    return Check(name, _rel(channel_stats(out).cov, expected), 1e-6, detail)


def _guard(report: VerificationReport, name: str, fn) -> None:
    try:
        report.add(fn())
    except FSTError as exc:
        report.add(Check(name, float("inf"), 0.0, f"{type(exc).__name__}: {exc}"))


def run_verification_suite(f_c=None, f_s=None, seed: int = 0, *,
                           rel_cutoff: float = linalg.DEFAULT_CUTOFF,
                           gram_opt_iters: int = 5000, fault: bool = False,
                           timings: bool = False) -> VerificationReport:
    """Run every registered check.

    `fault` perturbs T on the frequency route only (harness self-test).
    `timings` records stage times; reports stay byte-deterministic only
    without it.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return _run(f_c, f_s, seed, rel_cutoff, gram_opt_iters, fault, timings)


def _run(f_c, f_s, seed, rel_cutoff, gram_opt_iters, fault, timings) -> VerificationReport:
    rng = np.random.default_rng(seed)
    if f_c is None or f_s is None:
        f_c, f_s = synthetic_pair(seed)
    f_c, f_s = as_fmap(f_c), as_fmap(f_s)
    report = VerificationReport(seed=seed)
    probe_report = report if timings else None

    def probe(stage, thunk):
        return timing_probe(stage, thunk, probe_report)[1]

    spec_c = probe("dft_content", lambda: dft(f_c))
    spec_s = probe("dft_style", lambda: dft(f_s))
    stats_c, stats_s = channel_stats(f_c), channel_stats(f_s)

    energy = float(np.sum(f_c ** 2))
    spec_energy = float(np.sum(np.abs(spec_c.data) ** 2)) / (f_c.shape[1] * f_c.shape[2])
    report.add(Check("parseval", abs(energy - spec_energy) / max(energy, TINY), 1e-9))

    worst = 0.0
    for n_h, n_w in [(n, n) for n in range(1, 17)] + [(17, 31), (31, 17)]:
        x = rng.standard_normal((1, n_h, n_w))
        worst = max(worst, float(np.max(np.abs(fft2(x) - naive_dft2(x)))))
    report.add(Check("fft_vs_naive", worst, 1e-8))
    report.add(Check("idft_roundtrip", float(np.max(np.abs(idft(spec_c) - f_c))), 1e-9))

    outputs = {}
    for method in METHODS:
        def equivalence(method=method):
            xf = probe(f"build_{method}", lambda: build_transform(
                method, f_c, f_s, rel_cutoff, max_iters=gram_opt_iters))
            spatial = probe(f"spatial_{method}", lambda: apply_spatial(f_c, xf))
            xf_freq = replace(xf, t=xf.t + 1e-3) if fault else xf
            freq = probe(f"frequency_{method}",
                         lambda: idft(apply_frequency(spec_c, spec_s, xf_freq)))
            outputs[method] = (xf, spatial)
            return Check(f"domain_equivalence_{method}",
                         float(np.max(np.abs(freq - spatial))), 1e-6, xf.method)
        _guard(report, f"domain_equivalence_{method}", equivalence)
        if method in outputs:
            means = channel_stats(outputs[method][1]).mean
            report.add(Check(f"mean_alignment_{method}",
                             float(np.max(np.abs(means - stats_s.mean))), 1e-9))

    if "wct" in outputs:
        wct_out = outputs["wct"][1]
        spec_cs = dft(wct_out)
        spatial_loss = content_loss(wct_out, f_c)
        report.add(Check("content_loss_parseval",
                         abs(spectral_content_loss(spec_cs, spec_c) - spatial_loss)
                         / max(spatial_loss, TINY), 1e-6))
        report.add(Check("gram_parseval", _rel(spectral_gram(spec_cs), gram_matrix(wct_out)), 1e-6))

        def pr_checks():
            pr = phase_replace(spec_cs, spec_c)
            before = spectral_content_loss(spec_cs, spec_c)
            after = spectral_content_loss(pr, spec_c)
            report.add(Check("pr_content_loss_reduction",
                             max(0.0, after - before) / max(before, TINY), 1e-12,
                             f"before={before:.6e} after={after:.6e}"))
            report.add(Check("pr_amplitude_preservation",
                             _rel(np.diag(spectral_gram(pr)), np.diag(spectral_gram(spec_cs))), 1e-9))
            real = idft(pr)
            return Check("pr_real_output", float(np.max(np.abs(dft(real).data - pr.data)))
                         / max(float(np.max(np.abs(pr.data))), TINY), 1e-9)
        _guard(report, "pr_real_output", pr_checks)

    if "adain" in outputs:
        xf, out = outputs["adain"]
        kept = verify_phase_preservation(xf, spec_c)
        report.add(Check("adain_phase_preservation", kept.residual, kept.tolerance, kept.detail))
        report.add(Check("adain_variance_alignment",
                         _rel(np.diag(channel_stats(out).cov), np.diag(stats_s.cov)), 1e-6))

    probe_c = _mixed(rng, 3, 24, 24)
    probe_s = _mixed(rng, 3, 20, 28)
    xf_probe = build_transform("wct", probe_c, probe_s, rel_cutoff)
    generic = verify_phase_preservation(xf_probe, dft(probe_c))
    report.add(Check("wct_phase_disturbance", generic.residual, generic.tolerance, generic.detail))

    for method in ("wct", "optimal"):
        if method in outputs:
            report.add(covariance_check(f"covariance_alignment_{method}", outputs[method][1],
                                  stats_c, stats_s, method, rel_cutoff))
    if "wct" in outputs and "optimal" in outputs:
        l_wct = content_loss(outputs["wct"][1], f_c)
        l_opt = content_loss(outputs["optimal"][1], f_c)
        report.add(Check("optimal_wct_dominance", max(0.0, l_opt - l_wct) / max(1.0, l_wct), 1e-9,
                         f"optimal={l_opt:.6e} wct={l_wct:.6e}"))

    if "wct" in outputs:
        wct_out = outputs["wct"][1]
        cs_c, c_c = center_shift(dft(wct_out)), center_shift(spec_c)
        scale = max(float(np.max(np.abs(cs_c.data))), float(np.max(np.abs(c_c.data))), TINY)
        dev = max(
            float(np.max(np.abs(frequency_combine(cs_c, c_c, FrequencyWeight(constant=1.0)).data - cs_c.data))),
            float(np.max(np.abs(frequency_combine(cs_c, c_c, FrequencyWeight(constant=0.0)).data - c_c.data))),
            float(np.max(np.abs(frequency_combine(cs_c, c_c, FrequencyWeight(sigma=1e9)).data - cs_c.data))),
        ) / scale
        report.add(Check("fc_endpoints", dev, 1e-6))
        blended = idft(inverse_shift(frequency_combine(cs_c, c_c, FrequencyWeight(constant=0.3))))
        report.add(Check("fc_linear_blend", _rel(blended, linear_blend(wct_out, f_c, 0.3)), 1e-9))

        def idem():
            rank = linalg.effective_rank(stats_c.cov, rel_cutoff)
            if rank < stats_c.channels:
                # output covariance is rank-limited, so it cannot reproduce the style statistics
                return Check("idempotence", 0.0, 1e-6, f"not applicable: truncated-rank {rank}")
            again = apply_spatial(wct_out, build_transform("wct", wct_out, f_s, rel_cutoff))
            return Check("idempotence", _rel(again, wct_out), 1e-6)
        _guard(report, "idempotence", idem)

    gc = well_conditioned(rng, 4, 16, 16)
    gs = well_conditioned(rng, 4, 12, 20)
    xf_g = build_transform("gram-opt", gc, gs, max_iters=5000, tol=1e-10)
    norm2 = float(np.sum(channel_stats(gs).cov ** 2))
    report.add(Check("gram_opt_convergence", xf_g.info["objective"] / norm2, 1e-6,
                     f"iterations={xf_g.info['iterations']}"))
    return report

