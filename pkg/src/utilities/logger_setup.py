import logging
import os
from datetime import datetime

# Package loggers whose records also go to the run log (chain progress, adaptation, CGLS warnings)
RUN_LOGGERS = ('processors', 'inference', 'samplers', 'samples')


class LoggerSetup:
    """
    File logging for one UQ run: <log_dir>/app_<timestamp>.log.

    The named logger and the package loggers in RUN_LOGGERS write to the same file. Chains run in
    worker threads, so every record carries its thread name.
    """

    def __init__(self, log_dir='./../logs/', logger_name='uq_processor', captured=RUN_LOGGERS):
        self.log_dir = log_dir
        self.logger_name = logger_name
        self.logger = logging.getLogger(self.logger_name)
        self.logger.setLevel(logging.INFO)
        self.captured = [logging.getLogger(name) for name in captured]
        self._levels = {}
        self.file_handler = None
        self.log_filename = None
        self._setup_log_directory()
        self._setup_handlers()

    def _setup_log_directory(self):
        os.makedirs(self.log_dir, exist_ok=True)

    def _setup_handlers(self):
        # Reuse the handler of an earlier setup for the same directory
        target_dir = os.path.abspath(self.log_dir)
        for handler in self.logger.handlers:
            if isinstance(handler, logging.FileHandler) and os.path.dirname(handler.baseFilename) == target_dir:
                self.file_handler = handler
                self.log_filename = handler.baseFilename
                return

        timestamp = datetime.now().strftime('%Y-%m-%d_%H-%M-%S')
        self.log_filename = os.path.join(self.log_dir, f'app_{timestamp}.log')

        self.file_handler = logging.FileHandler(self.log_filename)
        self.file_handler.setLevel(logging.INFO)
        self.file_handler.setFormatter(logging.Formatter('%(asctime)s - %(threadName)s - %(levelname)s - %(message)s'))

        self.logger.addHandler(self.file_handler)
        for logger in self.captured:
            if logger.getEffectiveLevel() > logging.INFO:
                self._levels[logger.name] = logger.level
                logger.setLevel(logging.INFO)
            logger.addHandler(self.file_handler)

    def close(self):
        """Detach and close the run log so the output directory can be moved or removed."""
        if self.file_handler is None:
            return
        for logger in [self.logger] + self.captured:
            logger.removeHandler(self.file_handler)
            if logger.name in self._levels:
                logger.setLevel(self._levels.pop(logger.name))
        self.file_handler.close()
        self.file_handler = None

    def get_logger(self):
        return self.logger
