"""Exception hierarchy shared by all analysis modules.

Everything raised on bad data or bad parameters derives from
:class:`ScholarmetricsError`, so callers (CLI, service) can map the whole
family to one exit code / HTTP status.
"""


class ScholarmetricsError(Exception):
    """Base class for all data and parameter errors raised by this package."""


# ingest
class UndecodableBytes(ScholarmetricsError):
    pass


class NoHeaderRow(ScholarmetricsError):
    pass


class MappingRejected(ScholarmetricsError):
    pass


class MissingMandatoryField(ScholarmetricsError):
    pass


class EmptyInput(ScholarmetricsError):
    pass


# corpus
class InvalidSpec(ScholarmetricsError):
    pass


# bibtrail
class MalformedScimagoFile(ScholarmetricsError):
    pass


class MissingQuartileIndex(ScholarmetricsError):
    pass


# colabrix
class EmptyGraph(ScholarmetricsError):
    pass


class DisconnectedGraph(ScholarmetricsError):
    pass


class NoSuchComponent(ScholarmetricsError):
    pass


class PartitionMismatch(ScholarmetricsError):
    pass


# themantix
class NoDatedRecords(ScholarmetricsError):
    pass


class TooFewDocuments(ScholarmetricsError):
    pass


class EmptyVocabulary(ScholarmetricsError):
    pass


class KExceedsDocuments(ScholarmetricsError):
    pass


# viz
class IncompatibleChartType(ScholarmetricsError):
    pass


class InvalidOptions(ScholarmetricsError):
    pass
