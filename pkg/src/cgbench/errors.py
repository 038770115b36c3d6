"""Exception hierarchy shared by every cgbench module.

Each error carries a stable ``code`` string so the CLI and the tests can
match on the failure category without parsing messages.
"""

from __future__ import annotations


class CgbenchError(Exception):
    code = "ERROR"

    def __init__(self, message: str = "", **details):
        super().__init__(message or self.code)
        self.details = details

    def __str__(self) -> str:
        return f"{self.code}: {self.args[0]}"


class MalformedDocument(CgbenchError):
    code = "MALFORMED_DOCUMENT"


class SchemaViolation(CgbenchError):
    code = "SCHEMA_VIOLATION"


class JSParseError(CgbenchError):
    code = "PARSE_ERROR"

    def __init__(self, message: str, file: str = "<input>", line: int = 0, column: int = 0):
        super().__init__(f"{file}:{line}:{column}: {message}", file=file, line=line, column=column)
        self.file = file
        self.line = line
        self.column = column


class UnsupportedConstruct(JSParseError):
    code = "UNSUPPORTED_CONSTRUCT"

    def __init__(self, construct: str, file: str = "<input>", line: int = 0, column: int = 0):
        super().__init__(f"unsupported construct: {construct}", file, line, column)
        self.construct = construct


class MissingLocations(CgbenchError):
    code = "MISSING_LOCATIONS"


class DotSyntaxError(CgbenchError):
    code = "DOT_SYNTAX"


class LabelMismatch(CgbenchError):
    code = "LABEL_MISMATCH"

    def __init__(self, node_id: str, label: str):
        super().__init__(f"node {node_id!r}: label {label!r} does not match the node pattern")
        self.node_id = node_id
        self.label = label


class UnknownKey(CgbenchError):
    code = "UNKNOWN_KEY"


class KeyCollision(CgbenchError):
    code = "KEY_COLLISION"


class DuplicateToolId(CgbenchError):
    code = "DUPLICATE_TOOL_ID"


class UnknownEdge(CgbenchError):
    code = "UNKNOWN_EDGE"


class UnvalidatedEdges(CgbenchError):
    code = "UNVALIDATED_EDGES"

    def __init__(self, keys):
        self.keys = list(keys)
        shown = ", ".join(f"{a}->{b}" for a, b in self.keys[:10])
        more = f" (+{len(self.keys) - 10} more)" if len(self.keys) > 10 else ""
        super().__init__(f"{len(self.keys)} edge(s) lack a valid flag: {shown}{more}")


class SampleTooLarge(CgbenchError):
    code = "SAMPLE_TOO_LARGE"


class InfeasibleParams(CgbenchError):
    code = "INFEASIBLE_PARAMS"


class TargetFailed(CgbenchError):
    code = "TARGET_FAILED"

    def __init__(self, message: str, status: int | None = None):
        super().__init__(message, status=status)
        self.status = status


class MissingSource(CgbenchError):
    code = "MISSING_SOURCE"
