"""Exception hierarchy.

The CLI maps the three top-level families onto exit codes:
ConfigError -> 1, BackendError -> 2, DataError -> 3.
"""


class ToxtrajError(Exception):
    pass


class ConfigError(ToxtrajError):
    pass


class BackendError(ToxtrajError):
    pass


class DataError(ToxtrajError):
    pass


class QueryError(BackendError):
    """A backend failure while answering one query for one abstract."""

    def __init__(self, pmid, qid, cause):
        self.pmid = pmid
        self.qid = qid
        self.cause = cause
        super().__init__(f"pmid {pmid}, {qid}: {cause}")


class CorpusError(DataError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicatePmidError(CorpusError):
    def __init__(self, pmid, line=None):
        self.pmid = pmid
        super().__init__(f"duplicate pmid {pmid!r}", line)


class MissingFixture(BackendError):
    def __init__(self, key, role):
        self.key = key
        self.role = role
        super().__init__(f"no fixture for hash {key} (role {role!r})")


class PolicyLogprobUnavailable(BackendError):
    """The policy produced a refinement but no log-probability to learn from."""

    def __init__(self, refined_query):
        self.refined_query = refined_query
        super().__init__("LLM policy returned no token log-probabilities")


class NoMissingEntities(DataError):
    pass


class LayerSignatureError(DataError):
    pass


class UnknownEdgeError(DataError):
    pass


class EdgeConflictError(DataError):
    pass


class GraphFormatError(DataError):
    pass


class CypherError(DataError):
    def __init__(self, message, position):
        self.position = position
        super().__init__(f"{message} at position {position}")


class CypherLexError(CypherError):
    pass


class CypherUnknownLabel(CypherError):
    pass


class CypherUnknownRelation(CypherError):
    pass


class CypherMalformed(CypherError):
    pass
