class CorpusError(Exception):
    """Base class for corpus ingest failures."""


class CorpusParseError(CorpusError):
    def __init__(self, path, line_no, message):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{self.path}: line {line_no}: {message}")


class CorpusValidationError(CorpusError):
    pass


class IndexFormatError(CorpusError):
    """Cached graph index is missing, truncated, or from another format version."""
