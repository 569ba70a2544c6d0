"""Exception hierarchy shared by every module."""


class AnisoMeshError(Exception):
    """Base class for all errors raised by anisomesh."""


class InvalidMetric(AnisoMeshError, ValueError):
    pass


class DimensionError(AnisoMeshError, ValueError):
    pass


class EmptyInput(AnisoMeshError, ValueError):
    pass


class CanvasTooDense(AnisoMeshError, ValueError):
    pass


class SiteCollision(AnisoMeshError, ValueError):
    """Two sites snapped to the same canvas vertex; the canvas is too coarse."""


class OutOfDomain(AnisoMeshError, ValueError):
    pass


class InvalidSite(AnisoMeshError, IndexError):
    pass


class TooFewSites(AnisoMeshError, ValueError):
    pass


class InvalidBarycentric(AnisoMeshError, ValueError):
    pass


class NetOverflow(AnisoMeshError, RuntimeError):
    pass


class InvalidParams(AnisoMeshError, ValueError):
    pass


class DegenerateSites(AnisoMeshError, ValueError):
    """The exact oracle found cocircular/cospherical sites."""


class Unsupported(AnisoMeshError, NotImplementedError):
    pass


class ParseError(AnisoMeshError, ValueError):
    def __init__(self, message, path=None, line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
            if column is not None:
                where += f"{column}:"
        super().__init__(f"{where} {message}" if where else message)
