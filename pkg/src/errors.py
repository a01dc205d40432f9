"""
Exception hierarchy shared by the solver modules.

Library code raises these; only the CLI turns them into exit codes.
"""

EXIT_OK = 0
EXIT_NEGATIVE = 1        # not colorable / certificate rejected
EXIT_INPUT = 2           # unreadable or malformed input
EXIT_INTERNAL = 3        # internal assertion failed
EXIT_TIMEOUT = 4
EXIT_INTERRUPTED = 130


class KPathError(Exception):
	"""Base class of every error raised by this package."""


class InputError(KPathError, ValueError):
	"""The caller handed us something that does not describe a valid input."""


class GraphError(InputError):
	pass


class ColoringError(InputError):
	pass


class InstanceParseError(InputError):
	"""Instance text could not be parsed. `line_no` is 1-based, 0 when unknown."""

	def __init__(self, message: str, line_no: int = 0):
		self.line_no = line_no
		if line_no:
			message = f"line {line_no}: {message}"
		super().__init__(message)


class MalformedHeaderError(InstanceParseError):
	pass


class MalformedLineError(InstanceParseError):
	pass


class DuplicateEdgeError(InstanceParseError):
	pass


class SelfLoopError(InstanceParseError):
	pass


class VertexRangeError(InstanceParseError):
	pass


class EdgeCountError(InstanceParseError):
	pass


class DecompositionError(InputError):
	pass


class OracleCapError(InputError):
	pass


class SolverError(KPathError, AssertionError):
	"""An invariant the solver relies on did not hold (a bug, or a broken decomposition)."""


class SolverTimeout(KPathError):
	pass


class GeneratorError(InputError):
	"""Generator parameters are invalid or the region cannot hold the requested points."""
