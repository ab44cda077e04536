"""Exception types shared across the engine."""


class EngineError(Exception):
    """Base class for every domain error raised by this package.

    Anything else (OSError, ValueError from misuse, ...) is a caller bug or
    an I/O problem, not a domain outcome.
    """


class SchemaError(EngineError):
    """A document failed structural validation at a specific JSON path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


class DuplicateService(EngineError):
    def __init__(self, name: str):
        super().__init__(f"duplicate service name '{name}'")
        self.name = name


class DanglingCallTarget(EngineError):
    def __init__(self, target: str, where: str = ""):
        detail = f" (at {where})" if where else ""
        super().__init__(f"call target '{target}' is not a service in the manifest{detail}")
        self.target = target
        self.where = where


class BadRoute(EngineError):
    def __init__(self, service: str, route: str):
        super().__init__(f"service '{service}': base route {route!r} must be a non-empty string starting with '/'")
        self.service = service
        self.route = route


class EmptyInput(EngineError):
    """The supplied stream contained no usable content."""


class UnknownService(EngineError):
    def __init__(self, name: str):
        super().__init__(f"unknown service '{name}'")
        self.name = name


class UnknownSystem(EngineError):
    def __init__(self, system_id: str):
        super().__init__(f"no registered system '{system_id}'")
        self.system_id = system_id


class UnknownEndpoint(EngineError):
    def __init__(self, service: str, endpoint: str):
        super().__init__(f"service '{service}' has no endpoint '{endpoint}'")
        self.service = service
        self.endpoint = endpoint


class UnknownNode(EngineError):
    def __init__(self, node_id: str):
        super().__init__(f"unknown node '{node_id}'")
        self.node_id = node_id


class UnknownTrace(EngineError):
    def __init__(self, trace_id: str):
        super().__init__(f"unknown trace '{trace_id}'")
        self.trace_id = trace_id


class PathNotInGraph(EngineError):
    """A requested path uses an edge (or node) the graph does not have.

    ``missing`` names the first missing piece, e.g. "S2>S9" for an edge or
    "S9" for a lone node.
    """

    def __init__(self, missing: str):
        super().__init__(f"path is not in the graph: no '{missing}'")
        self.missing = missing


class InvalidConfig(EngineError):
    """A simulation config does not satisfy its mode requirements."""


class EmptyTraceSet(EngineError):
    """Automatic path selection was requested but there are no traces."""


class EmptyView(EngineError):
    """A layout was requested for a view without nodes."""
