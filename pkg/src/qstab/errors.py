"""Exception types raised by the analysis routines."""


class QstabError(Exception):
    """Base class for package-specific failures."""


class InternalInconsistencyError(QstabError):
    """Two routes that must agree (equivalent criteria, verified block
    structures, independent deciders) produced different answers.

    This signals a tolerance or implementation bug, never a property of
    the input channel.
    """


class NumericalDegeneracyError(QstabError):
    """A numerically degenerate situation prevented a well-defined
    answer (e.g. no PSD element found in a peripheral eigenspace, or no
    real eigenvalue near the spectral radius of a reduced map)."""
