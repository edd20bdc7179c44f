"""Exception types raised across the pipeline.

Every error carries a stable ``code`` string so the HTTP layer can map it
to a ``{code, message}`` payload without string matching.
"""

from __future__ import annotations


class ParacodeError(Exception):
    """Base class for all pipeline errors."""

    code = "error"


# corpus ---------------------------------------------------------------

class DuplicateDocId(ParacodeError):
    code = "duplicate_doc_id"


class EmptyDocument(ParacodeError):
    code = "empty_document"


class LabelIndexOutOfRange(ParacodeError):
    code = "label_index_out_of_range"


class UnknownDocId(ParacodeError):
    code = "unknown_doc_id"


# embedding ------------------------------------------------------------

class ProviderUnavailable(ParacodeError):
    code = "provider_unavailable"


class MissingVector(ParacodeError):
    code = "missing_vector"


class DimensionMismatch(ParacodeError):
    code = "dimension_mismatch"


# classifiers ----------------------------------------------------------

class SingleClassTraining(ParacodeError):
    code = "single_class_training"


class NonFiniteFeature(ParacodeError):
    code = "non_finite_feature"


class ShapeMismatch(ParacodeError):
    code = "shape_mismatch"


# ensemble -------------------------------------------------------------

class ThresholdOutOfRange(ParacodeError):
    code = "threshold_out_of_range"


class IncompleteBundle(ParacodeError):
    code = "incomplete_bundle"


class InconsistentInputs(ParacodeError):
    code = "inconsistent_inputs"


# evaluation -----------------------------------------------------------

class LengthMismatch(ParacodeError):
    code = "length_mismatch"


class EmptyInput(ParacodeError):
    code = "empty_input"


class EmptyGroup(ParacodeError):
    code = "empty_group"


# service --------------------------------------------------------------

class RoleEmpty(ParacodeError):
    code = "role_empty"


class MissingGold(ParacodeError):
    code = "missing_gold"


class UnknownSession(ParacodeError):
    code = "unknown_session"


class UnknownParagraph(ParacodeError):
    code = "unknown_paragraph"


class BadCursor(ParacodeError):
    code = "bad_cursor"


class MalformedSubmission(ParacodeError):
    code = "malformed_submission"


class ConfigError(ParacodeError):
    code = "config_error"
