"""Fitting workflow: from raw intensity samples to a scored channel model.

Synthesizes a 100k-sample campaign from a reference bubbly-water condition,
then fits all three candidate mixtures by EM and compares them the way a
measurement report would: fitted parameters, scintillation index, and the
two goodness-of-fit scores.
"""

import numpy as np

from uwoc import EmConfig, build_histogram, condition, fit, mse_cdf, r_square

TRUTH = condition("salty-16.5lpm")
N_SAMPLES = 100_000
SEED = 7


def main():
    rng = np.random.default_rng(SEED)
    samples = TRUTH.egg.sample(rng, N_SAMPLES)
    print(f"channel condition: {TRUTH.label} (measured sigma_I^2 = {TRUTH.sigma2_measured})")
    print(f"synthetic campaign: {N_SAMPLES} draws from the fitted EGG parameters\n")

    cfg = EmConfig(epsilon=1e-4, max_iters=300, restarts=2, seed=1)
    print(f"{'model':14s} {'sigma_I^2':>10s} {'MSE':>12s} {'R^2':>8s}  parameters")
    for variant in ("egg", "eg", "explognormal"):
        report = fit(samples, variant, cfg)
        hist = build_histogram(samples, bins=50)
        mse = mse_cdf(samples, report.model)
        r2 = r_square(hist, report.model)
        pars = ", ".join(f"{k}={v:.4g}" for k, v in report.model.params_dict().items())
        print(f"{variant:14s} {report.scintillation_index:10.4f} {mse:12.3e} {r2:8.4f}  {pars}")

    print(f"\ngenerating model sigma_I^2 = {TRUTH.egg.scintillation_index():.4f}")
    print("the two-lobe exponential + generalized-gamma fit tracks the")
    print("strong-turbulence shape that the gamma/lognormal lobes miss")


if __name__ == "__main__":
    main()
