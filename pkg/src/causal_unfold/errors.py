"""Exception types raised by the library."""


class EventStructureError(Exception):
    """Base class for all library errors."""


class ConfigExplosion(EventStructureError):
    """Configuration enumeration went past the configured cap."""

    def __init__(self, what, cap, found=None):
        self.what = what
        self.cap = cap
        self.found = found
        msg = f"{what}: cap of {cap} exceeded"
        if found is not None:
            msg += f" (reached {found})"
        super().__init__(msg)


class SearchExplosion(EventStructureError):
    """An exhaustive search (realisations, maps, partitions) went past its cap."""

    def __init__(self, what, cap, found=None):
        self.what = what
        self.cap = cap
        self.found = found
        msg = f"{what}: cap of {cap} exceeded"
        if found is not None:
            msg += f" (reached {found})"
        super().__init__(msg)


class KindMismatch(EventStructureError):
    """A structure of the wrong kind was passed for the requested category."""


class NotEquivClosed(EventStructureError):
    """A set of visible events is not closed under the equivalence."""


class NotStable(EventStructureError):
    """An equivalence family is not stable."""

    def __init__(self, report):
        self.report = report
        super().__init__(f"equivalence family is not stable: {len(report.witnesses)} witness(es)")


class AxiomsFailed(EventStructureError):
    """An ese fails one of the structural axioms (A)-(D)."""

    def __init__(self, axiom):
        self.axiom = axiom
        super().__init__(f"axiom ({axiom}) fails")
