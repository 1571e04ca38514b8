import math
import numpy as np
import pytest

from dataclasses import replace

from sketch_rpca.bounds.module.Bounds import (
	bound_alg1_red,
	bound_alg1_rrd,
	bound_alg2_red,
	bound_alg2_rrd,
	bound_lemmas,
	column_span_samples,
	compute_bound,
	embedding_rank_rows,
	row_separation_rows,
	sufficient_order
)
from sketch_rpca.bounds.structures.I_O_bounds import (
	COLUMN_SPAN_R5,
	EMBEDDING_RANK_R_PLUS_Q_15,
	INPUTS_ALG1,
	OUTPUTS_ALG1,
	ROW_SEPARATION_K1_OFFSET,
	UNIT_COHERENCE
)
from sketch_rpca.configs.configs import F_HALF
from sketch_rpca.custom_types.bounds_types import BoundInputs
from sketch_rpca.custom_types.sketch_types import gaussian_f_epsilon
from sketch_rpca.exceptions import InvalidParameterError


def loglog_slope(values, rs):
	return (math.log(values[1]) - math.log(values[0])) / (math.log(rs[1]) - math.log(rs[0]))


def test_alg1_red_worked_example():
	result = bound_alg1_red(BoundInputs(**INPUTS_ALG1))
	# assert the hand-computed alpha, beta and q
	assert result.alpha == pytest.approx(OUTPUTS_ALG1['alpha'], abs=1e-6)
	assert result.branches['alpha_outliers'] == pytest.approx(OUTPUTS_ALG1['alpha_outliers'], abs=1e-6)
	assert result.beta == pytest.approx(OUTPUTS_ALG1['beta'], abs=1e-6)
	assert result.q_bound == pytest.approx(OUTPUTS_ALG1['q'], abs=1e-3)
	# assert m1 = ceil(beta alpha N2/N2')
	assert result.m1_sufficient == OUTPUTS_ALG1['m1_sufficient']
	# assert m2 is the largest of its two terms
	assert result.m2_sufficient == math.ceil(max(result.branches['m2_rank'], result.branches['m2_separation']))
	assert result.feasible


def test_supporting_terms():
	# assert the column span sample count 10 mu r log(2r / delta)
	assert column_span_samples(5, 1.0, 0.05) == pytest.approx(COLUMN_SPAN_R5, abs=1e-6)
	# assert the embedding rank term for r + q = 15
	assert math.ceil(embedding_rank_rows(5, 10, 0.05, F_HALF)) == EMBEDDING_RANK_R_PLUS_Q_15
	# assert the row separation term with a single outlier
	assert row_separation_rows(7, 1, 0.05) == pytest.approx(7 + ROW_SEPARATION_K1_OFFSET, abs=1e-3)
	# assert f(1/2) of the Gaussian embedding
	assert gaussian_f_epsilon(0.5) == pytest.approx(F_HALF)


def test_bound_lemmas_keys():
	inputs = BoundInputs(**INPUTS_ALG1)
	lemmas = bound_lemmas(inputs)
	# assert every supporting expression is reported and q defaults to the one of the sufficient sizes
	assert set(lemmas) >= {'column_span', 'beta_min', 'alpha_outliers', 'q', 'm2_embedding_rank',
	                       'm2_embedding_separation', 'm2_row_span', 'm2_row_rank', 'm2_row_separation'}
	assert lemmas['q'] == pytest.approx(bound_alg1_red(inputs).q_bound)


def test_alg1_rrd_reports_both_separation_forms():
	result = bound_alg1_rrd(BoundInputs(**INPUTS_ALG1))
	# assert m2 covers the row span, rank and both separation branches
	branches = result.branches
	assert result.m2_sufficient == math.ceil(max(
		branches['m2_row_span'], branches['m2_rank'], branches['m2_separation_k'], branches['m2_separation_q']))
	# assert m1 does not depend on the row compression
	assert result.m1_sufficient == bound_alg1_red(BoundInputs(**INPUTS_ALG1)).m1_sufficient


def test_alg2_default_g_and_feasibility():
	inputs = BoundInputs(r=2, n1=500, n2=1000, n2_prime=999, k=1, coherence=UNIT_COHERENCE)
	result = bound_alg2_red(inputs)
	s = 1 + 6 * 2 * 1.0 * 121 / 9
	# assert the default g = 2 (N2'/N2) s
	assert result.g == pytest.approx(2 * 999 / 1000 * s)
	# assert a single outlier is admissible
	assert result.feasible
	assert result.alpha is None and result.q_bound is None

	crowded = replace(inputs, n2_prime=500, k=500)
	# assert half of the columns being outliers is not admissible and is reported as such
	assert not bound_alg2_red(crowded).feasible
	assert 'infeasible' in bound_alg2_red(crowded).metadata

	# assert g below its minimum is rejected
	with pytest.raises(InvalidParameterError):
		bound_alg2_red(replace(inputs, g=1.5))


def test_alg2_rrd_small_k_branch():
	inputs = BoundInputs(r=3, n1=500, n2=1000, n2_prime=999, k=1, coherence=UNIT_COHERENCE, c1=0.0, c2=0.0)
	result = bound_alg2_rrd(inputs)
	# assert with the row span term switched off, m2 is r + 1 + 2 log 40 + sqrt(8 log 40)
	assert result.branches['m2_separation'] == pytest.approx(3 + ROW_SEPARATION_K1_OFFSET, abs=1e-3)
	assert result.m2_sufficient == math.ceil(result.branches['m2_separation'])


def test_compute_bound_dispatch():
	inputs = BoundInputs(**INPUTS_ALG1)
	# assert the dispatcher matches the direct calls
	assert compute_bound(inputs, 'alg1', 'rrd') == bound_alg1_rrd(inputs)
	with pytest.raises(InvalidParameterError):
		compute_bound(inputs, 'alg3', 'red')


def test_bound_inputs_validation():
	# assert inconsistent sizes and out-of-range constants are rejected
	with pytest.raises(InvalidParameterError):
		BoundInputs(**{**INPUTS_ALG1, 'k': 100})
	with pytest.raises(InvalidParameterError):
		BoundInputs(**{**INPUTS_ALG1, 'delta': 0.3})
	with pytest.raises(InvalidParameterError):
		BoundInputs(**{**INPUTS_ALG1, 'c': 1.0})
	with pytest.raises(InvalidParameterError):
		BoundInputs(**{**INPUTS_ALG1, 'r': 0})


def test_sufficient_order_scales_quadratically_in_r():
	rs = [10, 100]
	for model in ('independent', 'column_sparse'):
		for design in ('red', 'rrd'):
			orders = [sufficient_order(model, design, r, UNIT_COHERENCE, 0, 100000) for r in rs]
			# assert r^2 growth without outliers
			assert loglog_slope(orders, rs) == pytest.approx(2.0, abs=1e-9)
	with pytest.raises(InvalidParameterError):
		sufficient_order('other', 'red', 5, UNIT_COHERENCE, 0, 100)


def test_bound_slopes_in_r():
	rs = [10, 100]

	def inputs(r):
		return BoundInputs(r=r, n1=100000, n2=100000, n2_prime=100000, k=0, coherence=UNIT_COHERENCE)

	alg2 = [bound_alg2_red(inputs(r)) for r in rs]
	# assert m1 m2 of the convex algorithm grows like r^2 up to logarithms
	assert abs(loglog_slope([b.m1_sufficient * b.m2_sufficient for b in alg2], rs) - 2) < 0.2
	# assert m2 grows linearly in r up to logarithms for both algorithms
	assert abs(loglog_slope([b.m2_sufficient for b in alg2], rs) - 1) < 0.2
	alg1 = [bound_alg1_red(inputs(r)) for r in rs]
	assert abs(loglog_slope([b.m2_sufficient for b in alg1], rs) - 1) < 0.2


def test_to_dict_is_json_ready():
	result = bound_alg2_rrd(BoundInputs(r=2, n1=500, n2=1000, n2_prime=990, k=10, coherence=UNIT_COHERENCE))
	as_dict = result.to_dict()
	# assert the intermediates are exposed with snake_case keys
	assert as_dict['algorithm'] == 'alg2' and as_dict['design'] == 'rrd'
	assert np.isfinite(as_dict['zeta']) and np.isfinite(as_dict['k_admissible'])
	assert 'm2_row_span' in as_dict['branches']


if __name__ == '__main__':
	test_alg1_red_worked_example()
	test_supporting_terms()
	test_bound_lemmas_keys()
	test_alg1_rrd_reports_both_separation_forms()
	test_alg2_default_g_and_feasibility()
	test_alg2_rrd_small_k_branch()
	test_compute_bound_dispatch()
	test_bound_inputs_validation()
	test_sufficient_order_scales_quadratically_in_r()
	test_bound_slopes_in_r()
	test_to_dict_is_json_ready()
