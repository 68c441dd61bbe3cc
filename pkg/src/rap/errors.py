"""Exception hierarchy shared by every pipeline stage."""


class RapError(Exception):
    """Base class for all pipeline errors."""


class ParseError(RapError, ValueError):
    def __init__(self, message: str, line: int | None = None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(f"{where}{message}")


class ValidationError(RapError, ValueError):
    def __init__(self, report):
        self.report = list(report)
        lines = "; ".join(str(v) for v in self.report)
        super().__init__(f"schema validation failed: {lines}")


class NodeNotFound(RapError, LookupError):
    def __init__(self, ids):
        if isinstance(ids, str):
            ids = [ids]
        self.ids = sorted(ids)
        super().__init__(f"unknown schema node(s): {', '.join(self.ids)}")


class UnknownLabel(RapError, ValueError):
    def __init__(self, record_id, label: str):
        self.record_id = record_id
        self.label = label
        super().__init__(f"record {record_id}: label {label!r} is not a node of the expected kind in the schema")


class SchemaMismatch(RapError, ValueError):
    pass


class EntryNotFound(RapError, LookupError):
    pass


class InvalidK(RapError, ValueError):
    pass


class SpanError(RapError, ValueError):
    pass


class InvalidFraction(RapError, ValueError):
    pass


class LengthMismatch(RapError, ValueError):
    pass


class AlignmentError(RapError, ValueError):
    pass


class TemplateError(RapError, ValueError):
    pass


class ConfigError(RapError, ValueError):
    pass
