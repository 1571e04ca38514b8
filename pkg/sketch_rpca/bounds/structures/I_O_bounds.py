from sketch_rpca.custom_types.data_types import CoherenceStats


UNIT_COHERENCE = CoherenceStats(
	mu_v=1.0,
	mu_v_prime=1.0,
	mu_u=1.0,
	eta_v=1.0,
	eta_u=1.0,
	gamma=1.0,
	rank_used=5
)

# r = 5, mu_v' = 1, delta = 0.05, c = 2, N2 = 1000, K = 200
INPUTS_ALG1 = {
	'r': 5,
	'n1': 1000,
	'n2': 1000,
	'n2_prime': 800,
	'k': 200,
	'coherence': UNIT_COHERENCE,
	'delta': 0.05,
	'c': 2.0
}

OUTPUTS_ALG1 = {
	'alpha': 599.1464547,  # 100 log 400
	'alpha_outliers': 11.06663836,  # 3 log 40
	'beta': 2.0184707,
	'q': 601.9131,
	'm1_sufficient': 1512,  # ceil(1.25 (2 alpha + 3 log 40))
}

# supporting expressions evaluated on their own
COLUMN_SPAN_R5 = 264.9158684  # 10 * 5 * log(200), delta = 0.05
EMBEDDING_RANK_R_PLUS_Q_15 = 1559  # ceil(24 (15 log(42 sqrt 2) + log 40))
ROW_SEPARATION_K1_OFFSET = 13.810  # r + 1 + 2 log 40 + sqrt(8 log 40) - r, delta = 0.05
