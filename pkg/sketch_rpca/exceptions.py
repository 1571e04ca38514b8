"""
Errors raised by the sketch_rpca library.
"""


class InvalidParameterError(ValueError):
	"""
	A precondition on the arguments of an operation does not hold.
	"""


class DegenerateInputError(ValueError):
	"""
	The input carries no information for the requested computation (e.g., a zero matrix).
	"""


class ConvergenceError(RuntimeError):
	"""
	An iterative solver hit its iteration cap.
	:param message: human-readable description
	:param partial: last iterate reached by the solver (a Decomposition for the convex solver, a float for the
		norm-constrained regression)
	:param primal_residual: last relative primal residual
	:param dual_residual: last relative dual residual
	"""
	def __init__(self, message: str, partial=None, primal_residual: float = None, dual_residual: float = None):
		super().__init__(message)
		self.partial = partial
		self.primal_residual = primal_residual
		self.dual_residual = dual_residual


class SolverTimeout(ConvergenceError):
	"""
	An iterative solver hit its wall-clock limit.
	"""


class InconsistentBasisError(RuntimeError):
	"""
	The columns selected for the basis do not have the estimated rank.
	"""


class RecoveryFailure(RuntimeError):
	"""
	Subspace recovery could not proceed, e.g., no inlier was detected in the sketch.
	"""
	def __init__(self, message: str, profile=None):
		super().__init__(message)
		self.profile = profile
