from hotmapper.logger.search_logger import SearchLogger
from hotmapper.logger.verbose import VerbosePrinter

__all__ = ["SearchLogger", "VerbosePrinter"]
