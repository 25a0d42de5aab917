import numpy as np
import pytest

from cgqf.validation import FAULTS, random_spectral_form, run_validation


def test_quick_suite_passes():
    results = run_validation(quick=True)
    assert len(results) == 8
    assert all(r.passed for r in results), "\n".join(r.line() for r in results)


def test_injected_fault_is_detected():
    results = {r.name: r for r in run_validation(quick=True, fault="residue")}
    assert not results["reconstruction identity"].passed
    assert results["residue oracles"].passed


def test_unknown_fault():
    assert FAULTS == ("residue",)
    with pytest.raises(ValueError):
        run_validation(quick=True, fault="nope")


def test_random_forms_are_well_separated():
    rng = np.random.default_rng(0)
    for _ in range(50):
        sf = random_spectral_form(rng)
        mag = np.sort(np.abs(sf.lam))
        assert sf.n <= 6 and np.all(mag >= 0.2) and np.all(mag <= 3.0)
        assert sf.n == 1 or np.min(np.diff(mag)) > 0.05
        assert np.all((sf.mu >= 0) & (sf.mu <= 8))
