import logging


FORMAT = '%(levelname)s %(name)s: %(message)s'

_logger = None


def setup_logging(level):
    """
    Configure the root handler and route Python warnings (numpy floating
    point warnings among them) into the log.
    """
    logging.basicConfig(level=level, format=FORMAT)
    logging.captureWarnings(True)
    global _logger
    _logger = logging.getLogger('boundarymass')
    _logger.setLevel(level)


def _log_method(name):
    def __log_method(*a, **kw):
        global _logger
        if _logger is None:
            _logger = logging.getLogger('boundarymass')
        return getattr(_logger, name)(*a, **kw)
    return __log_method


debug = _log_method('debug')
warning = _log_method('warning')
info = _log_method('info')
