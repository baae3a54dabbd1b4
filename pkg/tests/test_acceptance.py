"""Acceptance criteria, one test per criterion, printed pass/fail lines.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines; the CLI `pfg selftest` executes the same checks.
"""

import pytest

from pfg import acceptance


def _assert_criterion(result):
    print(f"criterion {result.criterion:2d} [{'PASS' if result.passed else 'FAIL'}] {result.name}: {result.detail}")
    assert result.passed, f"criterion {result.criterion} ({result.name}): {result.detail}"


def test_criterion_01_paper_example_reproduction():
    _assert_criterion(acceptance.check_paper_example())


def test_criterion_02_theorem_a_sweep():
    _assert_criterion(acceptance.check_theorem_a_sweep(seed=0, samples=acceptance.SWEEP_SAMPLES))


def test_criterion_03_oracle_equivalence():
    _assert_criterion(acceptance.check_oracle_equivalence(seed=0))


def test_criterion_04_splitthm_decompositions():
    _assert_criterion(acceptance.check_splitthm())


def test_criterion_05_theorem_b_towers():
    _assert_criterion(acceptance.check_theorem_b_towers())


def test_criterion_06_section2_lemma_suite():
    _assert_criterion(acceptance.check_section2_lemmas(seed=0, samples=acceptance.SWEEP_SAMPLES))


def test_criterion_07_simple_quotient_witness():
    _assert_criterion(acceptance.check_simple_quotient_witness())


def test_criterion_08_regulation_suite():
    _assert_criterion(acceptance.check_regulation_suite())


def test_criterion_09_lattice_correctness():
    _assert_criterion(acceptance.check_lattice())


def test_criterion_10_dsl_and_report_determinism():
    _assert_criterion(acceptance.check_dsl_and_determinism())
