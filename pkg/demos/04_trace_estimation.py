"""
Stochastic trace estimation
===========================

The trace of a projector can be estimated from quadratic forms with
random probes. We estimate the rank of a random rank-25 projector with
Rademacher and normalized Gaussian probes and watch the running mean.
"""
import numpy as np

from speccount.trace import SampleConfig, hutchinson_min_samples, rq_estimate

n, rank = 400, 25
Q, _ = np.linalg.qr(np.random.default_rng(3).standard_normal((n, rank)))


def qform(v):
    w = Q.T @ v
    return w @ w


for kind in ("rademacher", "gaussian_normalized"):
    run = rq_estimate(qform, n, SampleConfig(kind=kind, n_v_max=300, seed=0, early_stop=False))
    print(f"{kind:20s} estimate {run.estimate:7.3f} +- {run.std_error:.3f}  "
          f"mean after 10/100/300: {run.running_mean[[9, 99, 299]].round(2)}")

# with early stopping the run ends once the running mean settles
run = rq_estimate(qform, n, SampleConfig(kind="rademacher", n_v_max=300, seed=0))
print("early stop at", run.converged_at, "samples, estimate", round(run.estimate, 3))
print("samples guaranteeing rank 25 within 50% with prob. 0.9:", hutchinson_min_samples(rank, 0.1))
