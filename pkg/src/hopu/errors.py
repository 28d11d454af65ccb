"""Exception hierarchy shared by the frontend, engine and CLI."""


class HopuError(Exception):
    """Base class for user-facing errors."""


class ParseError(HopuError):
    def __init__(self, msg, line=None, col=None, source=None):
        where = ""
        if line is not None:
            where = f"{source + ':' if source else ''}{line}:{col}: "
        super().__init__(f"{where}{msg}")
        self.line = line
        self.col = col


class TypeCheckError(HopuError):
    def __init__(self, msg, pos=None):
        where = f"{pos[0]}:{pos[1]}: " if pos else ""
        super().__init__(f"{where}type error: {msg}")
        self.pos = pos


class LoadError(HopuError):
    pass


class EngineError(HopuError):
    """Runtime error during solving, e.g. an undefined predicate."""


class StepLimit(HopuError):
    pass
