"""
Closed-form sufficient conditions on the sketch size (m1 sampled columns, m2 compressed rows) that guarantee exact
subspace recovery and outlier identification, for both algorithms and both row compression designs.
All logarithms are natural; ceilings are applied to the final m1/m2 only.
"""
import math

from typing import (
	Dict,
	Optional
)

from sketch_rpca.custom_types.bounds_types import (
	BoundInputs,
	BoundResult,
	OutlierModel
)
from sketch_rpca.custom_types.data_types import CoherenceStats
from sketch_rpca.exceptions import InvalidParameterError

LOG_NET = math.log(42 * math.sqrt(2))  # log of the covering number constant of the embedding argument
COHERENCE_FACTOR = 121 / 9


# -- SUPPORTING TERMS --------------------------------------------------------------------------------------------------
def column_span_samples(r: int, mu: float, delta: float) -> float:
	"""
	Number of columns sampled with replacement from a rank r matrix with row space coherence mu that span its column
	space with probability 1 - delta: 10 mu r log(2r / delta).
	"""
	return 10 * mu * r * math.log(2 * r / delta)


def inlier_count_beta(alpha: float, delta: float) -> float:
	"""
	Smallest beta such that m1 = beta alpha N2/N2' sampled columns hold at least alpha inliers w.p. 1 - delta.
	"""
	return 2 + 3 / alpha * math.log(2 / delta)


def sampled_outlier_bound(alpha: float, beta: float, k_ratio: float, c: float) -> float:
	"""
	Upper bound q = alpha (beta K/N2' + 1/c) on the number of sampled outliers.
	"""
	return alpha * (beta * k_ratio + 1 / c)


def outlier_count_alpha(k_ratio: float, c: float, delta: float) -> float:
	"""
	Smallest alpha for which the sampled outlier bound holds: 3 c^2 (K/N2') log(2 / delta).
	"""
	return 3 * c ** 2 * k_ratio * math.log(2 / delta)


def embedding_rank_rows(r: int, q: float, delta: float, f_half: float) -> float:
	"""
	Gaussian embedding dimension that keeps rank(Phi D_s) = rank(D_s) when D_s holds at most q outliers.
	"""
	return ((r + q) * LOG_NET + math.log(2 / delta)) / f_half


def embedding_separation_rows(r: int, q: float, delta: float, f_half: float) -> float:
	"""
	Gaussian embedding dimension that keeps every sampled outlier outside the compressed column space of L.
	"""
	return ((r + 1) * LOG_NET + math.log(max(q, 1)) + math.log(2 / delta)) / f_half


def row_span_rows(r: int, eta_u: float, delta: float, c1: float, c2: float) -> float:
	"""
	Number of uniformly sampled rows of L that span its row space: r eta_u^2 max(c1 log r, c2 log(3 / delta)).
	"""
	return r * eta_u ** 2 * max(c1 * math.log(r), c2 * math.log(3 / delta))


def row_rank_rows(r: int, q: float, delta: float) -> float:
	"""
	Number of sampled rows that keep the rank of a sketch with at most q Gaussian outliers:
	r + q + 2 log(2 / delta) + sqrt(8 q log(2 / delta)).
	"""
	log_term = math.log(2 / delta)
	return r + q + 2 * log_term + math.sqrt(8 * q * log_term)


def row_separation_rows(r: int, count: float, delta: float) -> float:
	"""
	Number of sampled rows that keep each of "count" Gaussian outliers outside the compressed column space of L:
	r + 1 + 2 log(2 count / delta) + sqrt(8 log(2 count / delta)).
	"""
	log_term = math.log(2 * max(count, 1) / delta)
	return r + 1 + 2 * log_term + math.sqrt(8 * log_term)


# -- SUFFICIENT SIZES --------------------------------------------------------------------------------------------------
def _alg1_column_terms(inputs: BoundInputs) -> Dict[str, float]:
	k_ratio = inputs.k / inputs.n2_prime
	alpha_span = 2 * column_span_samples(inputs.r, inputs.coherence.mu_v_prime, inputs.delta / 2)
	alpha_count = outlier_count_alpha(k_ratio, inputs.c, inputs.delta)
	alpha = max(alpha_span, alpha_count)
	beta = inlier_count_beta(alpha, inputs.delta)
	return {
		'alpha_span': alpha_span,
		'alpha_outliers': alpha_count,
		'alpha': alpha,
		'beta': beta,
		'q': sampled_outlier_bound(alpha, beta, k_ratio, inputs.c),
		'm1': beta * alpha * inputs.n2 / inputs.n2_prime
	}


def bound_alg1_red(inputs: BoundInputs) -> BoundResult:
	"""
	Sufficient (m1, m2) for the independent outlier model with a Gaussian embedding:
	 - alpha = max(20 mu_v' r log(4r / delta), 3 c^2 (K/N2') log(2 / delta))
	 - beta = 2 + (3 / alpha) log(2 / delta), q = alpha (beta K/N2' + 1/c), m1 = beta alpha N2/N2'
	 - m2 = max of the embedding rank term with r + q and the separation term with r + 1 and log K
	:param inputs: bound inputs
	:return: bound result with every branch value
	"""
	terms = _alg1_column_terms(inputs)
	branches = {
		**terms,
		'm2_rank': embedding_rank_rows(inputs.r, terms['q'], inputs.delta, inputs.f_epsilon_at_half),
		'm2_separation': embedding_separation_rows(inputs.r, inputs.k, inputs.delta, inputs.f_epsilon_at_half)
	}
	return BoundResult(
		alpha=terms['alpha'],
		beta=terms['beta'],
		q_bound=terms['q'],
		m1_sufficient=math.ceil(terms['m1']),
		m2_sufficient=math.ceil(max(branches['m2_rank'], branches['m2_separation'])),
		design='red',
		algorithm='alg1',
		branches=branches,
		metadata={'log_k': 'log K is evaluated with max(K, 1)'}
	)


def bound_alg1_rrd(inputs: BoundInputs) -> BoundResult:
	"""
	Sufficient (m1, m2) for the independent outlier model with row sampling. alpha, beta, q and m1 are those of the
	Gaussian embedding; m2 is the max of the row span term (with c1, c2), the rank term with r + q and the separation
	term. The separation term is evaluated with the outlier count K and with the sampled outlier bound q; the larger
	one is used.
	:param inputs: bound inputs
	:return: bound result with every branch value
	"""
	terms = _alg1_column_terms(inputs)
	branches = {
		**terms,
		'm2_row_span': row_span_rows(inputs.r, inputs.coherence.eta_u, inputs.delta, inputs.c1, inputs.c2),
		'm2_rank': row_rank_rows(inputs.r, terms['q'], inputs.delta),
		'm2_separation_k': row_separation_rows(inputs.r, inputs.k, inputs.delta),
		'm2_separation_q': row_separation_rows(inputs.r, terms['q'], inputs.delta)
	}
	m2 = max(branches['m2_row_span'], branches['m2_rank'], branches['m2_separation_k'], branches['m2_separation_q'])
	return BoundResult(
		alpha=terms['alpha'],
		beta=terms['beta'],
		q_bound=terms['q'],
		m1_sufficient=math.ceil(terms['m1']),
		m2_sufficient=math.ceil(m2),
		design='rrd',
		algorithm='alg1',
		branches=branches,
		metadata={
			'separation': 'evaluated with log(2K/delta) and with log(2q/delta); the larger is kept',
			'c1_c2': f'unspecified numerical constants, set to c1={inputs.c1}, c2={inputs.c2}'
		}
	)


def _alg2_column_terms(inputs: BoundInputs) -> Dict[str, float]:
	ratio = inputs.n2 / inputs.n2_prime
	k_ratio = inputs.k / inputs.n2_prime
	spread = 1 + 6 * inputs.r * inputs.coherence.mu_v * COHERENCE_FACTOR
	g_min = spread / ratio
	g = inputs.g if inputs.g is not None else 2 * g_min
	if g < g_min:
		raise InvalidParameterError(f'g = {g} must be >= (N2\'/N2)(1 + 6 r mu_v 121/9) = {g_min}')
	zeta_outliers = 3 * g ** 2 * k_ratio * math.log(2 / inputs.delta)
	zeta_span = column_span_samples(inputs.r, inputs.coherence.mu_v, inputs.delta) / ratio
	zeta = max(zeta_outliers, zeta_span)
	k_admissible = (g * ratio - spread) / (g * spread)
	return {
		'g': g,
		'g_min': g_min,
		'zeta_outliers': zeta_outliers,
		'zeta_span': zeta_span,
		'zeta': zeta,
		'k_ratio': k_ratio,
		'k_admissible': k_admissible,
		'm1': ratio * zeta,
		'expected_sampled_outliers': zeta * k_ratio
	}


def _alg2_result(inputs: BoundInputs, terms: Dict[str, float], branches: Dict[str, float], m2: float,
                 design: str) -> BoundResult:
	feasible = terms['k_ratio'] <= terms['k_admissible']
	metadata = {'log_k': 'log K is evaluated with max(K, 1)'}
	if not feasible:
		metadata['infeasible'] = (f'K/N2\' = {terms["k_ratio"]:.6g} exceeds the admissible '
		                          f'{terms["k_admissible"]:.6g} (K <= {terms["k_admissible"] * inputs.n2_prime:.6g})')
	return BoundResult(
		alpha=None,
		beta=None,
		q_bound=None,
		m1_sufficient=math.ceil(terms['m1']),
		m2_sufficient=math.ceil(m2),
		design=design,
		algorithm='alg2',
		k_admissible=terms['k_admissible'],
		zeta=terms['zeta'],
		g=terms['g'],
		feasible=feasible,
		branches=branches,
		metadata=metadata
	)


def bound_alg2_red(inputs: BoundInputs) -> BoundResult:
	"""
	Sufficient (m1, m2) for the column-sparse outlier model with a Gaussian embedding:
	 - zeta = max(3 g^2 (K/N2') log(2 / delta), (N2'/N2) 10 r mu_v log(2r / delta)), m1 = (N2/N2') zeta
	 - K/N2' <= (g N2/N2' - s) / (g s) with s = 1 + 6 r mu_v 121/9 and g >= (N2'/N2) s
	 - m2 = ((r + 1) log(42 sqrt 2) + log K + log(2 / delta)) / f(1/2)
	When g is not given it defaults to 2 (N2'/N2) s. An inadmissible K is reported with feasible = False.
	:param inputs: bound inputs
	:return: bound result with every branch value
	"""
	terms = _alg2_column_terms(inputs)
	branches = {
		**terms,
		'm2_separation': embedding_separation_rows(inputs.r, inputs.k, inputs.delta, inputs.f_epsilon_at_half)
	}
	return _alg2_result(inputs, terms, branches, branches['m2_separation'], 'red')


def bound_alg2_rrd(inputs: BoundInputs) -> BoundResult:
	"""
	Same m1, g and admissibility as bound_alg2_red, with
	m2 = max(r eta_u^2 max(c1 log r, c2 log(3 / delta)), r + 1 + 2 log(2K / delta) + sqrt(8 log(2K / delta))).
	:param inputs: bound inputs
	:return: bound result with every branch value
	"""
	terms = _alg2_column_terms(inputs)
	branches = {
		**terms,
		'm2_row_span': row_span_rows(inputs.r, inputs.coherence.eta_u, inputs.delta, inputs.c1, inputs.c2),
		'm2_separation': row_separation_rows(inputs.r, inputs.k, inputs.delta)
	}
	return _alg2_result(
		inputs, terms, branches, max(branches['m2_row_span'], branches['m2_separation']), 'rrd')


def bound_lemmas(inputs: BoundInputs, q: Optional[float] = None) -> Dict[str, float]:
	"""
	Evaluates every supporting sufficient-sample expression individually.
	:param inputs: bound inputs
	:param q: number of sampled outliers to plug in (defaults to the bound q of the independent model)
	:return: {
		'column_span': 10 mu_v' r log(2r / delta) sampled inliers spanning the column space
		'beta_min': smallest beta guaranteeing alpha sampled inliers
		'alpha_outliers': 3 c^2 (K/N2') log(2 / delta)
		'q': bound on the number of sampled outliers
		'm2_embedding_rank': embedding rows preserving rank(D_s)
		'm2_embedding_separation': embedding rows keeping the outliers out of the span of L
		'm2_row_span': sampled rows spanning the row space of L
		'm2_row_rank': sampled rows preserving rank(D_s)
		'm2_row_separation': sampled rows keeping the outliers out of the span of L
	}
	"""
	terms = _alg1_column_terms(inputs)
	q = terms['q'] if q is None else q
	return {
		'column_span': column_span_samples(inputs.r, inputs.coherence.mu_v_prime, inputs.delta),
		'beta_min': terms['beta'],
		'alpha_outliers': terms['alpha_outliers'],
		'q': q,
		'm2_embedding_rank': embedding_rank_rows(inputs.r, q, inputs.delta, inputs.f_epsilon_at_half),
		'm2_embedding_separation': embedding_separation_rows(inputs.r, q, inputs.delta, inputs.f_epsilon_at_half),
		'm2_row_span': row_span_rows(inputs.r, inputs.coherence.eta_u, inputs.delta, inputs.c1, inputs.c2),
		'm2_row_rank': row_rank_rows(inputs.r, q, inputs.delta),
		'm2_row_separation': row_separation_rows(inputs.r, q, inputs.delta)
	}


def compute_bound(inputs: BoundInputs, algorithm: str, design: str) -> BoundResult:
	"""
	Dispatches to the bound of the given algorithm ("alg1" or "alg2") and design ("red" or "rrd").
	"""
	functions = {
		('alg1', 'red'): bound_alg1_red,
		('alg1', 'rrd'): bound_alg1_rrd,
		('alg2', 'red'): bound_alg2_red,
		('alg2', 'rrd'): bound_alg2_rrd
	}
	if (algorithm, design) not in functions:
		raise InvalidParameterError(f'no bound for algorithm={algorithm}, design={design}')
	return functions[(algorithm, design)](inputs)


def sufficient_order(model: OutlierModel, design: str, r: int, coherence: CoherenceStats, k: int, n2: int) \
		-> float:
	"""
	Order of the sufficient number of random linear observations m1 m2, without constants or logarithms.
	:param model: "independent" (first algorithm) or "column_sparse" (second algorithm)
	:param design: "red" or "rrd"
	:param r: rank
	:param coherence: coherence statistics (mu_v, mu_v', eta_u are used)
	:param k: number of outliers K
	:param n2: number of columns N2
	:return: order value
	"""
	k_ratio = k / n2
	if model == 'independent':
		mu = coherence.mu_v_prime
		floor = 1.0 if design == 'red' else coherence.eta_u ** 2
		return r ** 2 * mu * max(floor, mu * k_ratio)
	if model == 'column_sparse':
		mu = coherence.mu_v
		scale = 1.0 if design == 'red' else coherence.eta_u ** 2
		return r ** 2 * scale * max(mu, r * mu ** 2 * k_ratio)
	raise InvalidParameterError(f'model = {model} not recognized')
