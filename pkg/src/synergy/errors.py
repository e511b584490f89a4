"""Exception types shared across the synergy engine.

Every domain error carries a stable ``code`` string; the HTTP layer maps
these to 422 responses with ``{"error": <code>, "detail": <message>}``.
"""


class SynergyError(Exception):
    """Base class for all domain errors raised by this package."""

    code = "error"


class ScaleMismatch(SynergyError):
    """Baseline combiner or value is incompatible with the value scale."""

    code = "scale_mismatch"


class MixedScales(SynergyError):
    """Scores from different scales or baselines were combined."""

    code = "mixed_scales"


class UnknownElement(SynergyError):
    """Element id not present in the declared pool or data."""

    code = "unknown_element"


class UnknownLabel(SynergyError):
    """Label not present in an ordinal scale."""

    code = "unknown_label"


class CardinalityError(SynergyError):
    """Set cardinality outside the operation's allowed range."""

    code = "cardinality_error"


class InvalidValue(SynergyError):
    """Value payload violates its scale's invariants."""

    code = "invalid_value"


class InvalidSpace(SynergyError):
    """Candidate space parameters violate the space invariants."""

    code = "invalid_space"


class EmptySpace(SynergyError):
    """Candidate space denotes no sets."""

    code = "empty_space"


class TooFewScores(SynergyError):
    """Not enough scores for the requested outlier method."""

    code = "too_few_scores"


class MalformedStream(SynergyError):
    """Input stream could not be decoded at all."""

    code = "malformed_stream"


class TooManyRejects(SynergyError):
    """More than the tolerated share of input lines were invalid."""

    code = "too_many_rejects"


class EmptyLog(SynergyError):
    """Operation requires a non-empty match log."""

    code = "empty_log"


class NeverCoOccurred(SynergyError):
    """Elements never appeared on the same side in the log."""

    code = "never_co_occurred"


class NeverOpposed(SynergyError):
    """Elements never appeared on opposite sides in the log."""

    code = "never_opposed"


class EvaluationGap(SynergyError):
    """Value function cannot evaluate this set from the available data."""

    code = "evaluation_gap"


class NoMoveLog(SynergyError):
    """Match record has no move log."""

    code = "no_move_log"


class NoSequencedRecords(SynergyError):
    """No record in the log carries a move log."""

    code = "no_sequenced_records"


class UnknownCard(SynergyError):
    """Card id not present in the card pool."""

    code = "unknown_card"


class CopyCapExceeded(SynergyError):
    """A set contains more copies of a card than the copy cap allows."""

    code = "copy_cap_exceeded"


class InvalidCardSet(SynergyError):
    """Card-set JSON violates the documented schema."""

    code = "invalid_card_set"


class InvalidEdit(SynergyError):
    """Rebalance edit targets an unknown field or carries a bad value."""

    code = "invalid_edit"


class EmptyPool(SynergyError):
    """No candidates remain available for recommendation."""

    code = "empty_pool"


class MatrixLogMismatch(SynergyError):
    """Synergy and counter matrices were built from different logs."""

    code = "matrix_log_mismatch"


class InvalidDraftState(SynergyError):
    """Draft state violates slot limits or disjointness."""

    code = "invalid_draft_state"


class UnavailableCandidate(SynergyError):
    """Candidate is banned, already picked, or not in the pool."""

    code = "unavailable_candidate"


class SnapshotLoadError(SynergyError):
    """Snapshot file is missing, corrupt, or has an unsupported format."""

    code = "snapshot_load_error"
