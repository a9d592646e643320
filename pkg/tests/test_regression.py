import numpy as np
import pytest

from hubbid.domain import fit_cluster_power_model, fit_memory_ratios
from hubbid.errors import FitError


def test_exact_affine_model_recovered():
    cpu = np.array([0.0, 10.0, 20.0, 35.0, 50.0])
    usage = {
        "CPU": cpu,
        "GPU": np.zeros(5),
        "MEM-CPU": np.zeros(5),
        "MEM-GPU": np.zeros(5),
    }
    power = 10.0 + 2.0 * cpu
    intercept, coeff = fit_cluster_power_model(usage, power)
    assert intercept == pytest.approx(10.0, abs=1e-9)
    assert coeff["CPU"] == pytest.approx(2.0, abs=1e-9)
    # idle columns dropped, coefficient reported as zero
    assert coeff["GPU"] == 0.0
    assert coeff["MEM-CPU"] == 0.0
    assert coeff["MEM-GPU"] == 0.0


def test_constant_power_gives_flat_model():
    usage = {"CPU": [1.0, 2.0, 3.0, 4.0]}
    intercept, coeff = fit_cluster_power_model(usage, [5.0] * 4)
    assert intercept == pytest.approx(5.0, abs=1e-9)
    assert coeff["CPU"] == pytest.approx(0.0, abs=1e-9)


def test_single_row_is_underdetermined():
    with pytest.raises(FitError):
        fit_cluster_power_model({"CPU": [3.0]}, [12.0])


def test_repeated_rows_are_underdetermined():
    with pytest.raises(FitError):
        fit_cluster_power_model({"CPU": [3.0, 3.0, 3.0]}, [12.0, 12.0, 12.0])


def test_collinear_columns_named():
    cpu = np.array([1.0, 2.0, 3.0, 4.0])
    usage = {"CPU": cpu, "GPU": 2.0 * cpu}
    with pytest.raises(FitError, match="GPU"):
        fit_cluster_power_model(usage, 3.0 * cpu)


def test_unknown_column_rejected():
    with pytest.raises(FitError, match="TPU"):
        fit_cluster_power_model({"TPU": [1.0, 2.0]}, [1.0, 2.0])


def test_noisy_affine_model_recovered_to_tolerance():
    rng = np.random.default_rng(11)
    for _ in range(20):
        n = 200
        usage = {
            "CPU": rng.uniform(0, 100, n),
            "GPU": rng.uniform(0, 20, n),
            "MEM-CPU": rng.uniform(0, 400, n),
            "MEM-GPU": rng.uniform(0, 160, n),
        }
        true_intercept = rng.uniform(1, 20)
        true_coeff = {r: rng.uniform(0.01, 3.0) for r in usage}
        power = true_intercept + sum(true_coeff[r] * usage[r] for r in usage)
        intercept, coeff = fit_cluster_power_model(usage, power)
        assert intercept == pytest.approx(true_intercept, rel=1e-8)
        for r in usage:
            assert coeff[r] == pytest.approx(true_coeff[r], rel=1e-8)


def test_memory_ratio_constant():
    cpu = np.array([1.0, 5.0, 9.0])
    history = {("a", "CPU"): cpu, ("a", "MEM-CPU"): 4.0 * cpu}
    assert fit_memory_ratios(history) == {("a", "MEM-CPU"): pytest.approx(4.0)}


def test_memory_ratio_is_mean_of_row_ratios():
    history = {
        ("a", "CPU"): [1.0, 1.0],
        ("a", "MEM-CPU"): [2.0, 4.0],
    }
    ratios = fit_memory_ratios(history)
    assert ratios[("a", "MEM-CPU")] == pytest.approx(3.0)


def test_memory_ratio_skips_zero_compute_rows():
    history = {
        ("a", "GPU"): [0.0, 2.0],
        ("a", "MEM-GPU"): [100.0, 16.0],
    }
    ratios = fit_memory_ratios(history)
    assert ratios[("a", "MEM-GPU")] == pytest.approx(8.0)


def test_memory_ratio_all_zero_compute_errors():
    history = {("a", "CPU"): [0.0, 0.0], ("a", "MEM-CPU"): [1.0, 2.0]}
    with pytest.raises(FitError):
        fit_memory_ratios(history)


def test_memory_ratio_requires_partner_series():
    with pytest.raises(FitError, match="CPU"):
        fit_memory_ratios({("a", "MEM-CPU"): [1.0, 2.0]})
