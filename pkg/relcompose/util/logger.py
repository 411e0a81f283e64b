import logging
import os
import time

import numpy as np

ENV_LEVEL = 'RELCOMPOSE_LOG'
_LEVELS = dict(
    error=logging.ERROR,
    warn=logging.WARNING,
    warning=logging.WARNING,
    info=logging.INFO,
    debug=logging.DEBUG,
)

logging.basicConfig(format='%(levelname)s %(name)s: %(message)s')


def env_level(default=logging.WARNING):
    value = os.environ.get(ENV_LEVEL, '').strip().lower()
    return _LEVELS.get(value, default)


def get_logger(name=__name__):
    logger = logging.getLogger(name)
    logger.setLevel(level=env_level())
    return logger


class Logger(object):
    """Run logger for compose and bench.

    Wraps a named `logging` logger and, when asked, a tensorboardX writer that
    receives one group of scalars per benchmark instance.
    """

    def __init__(self,
                 name,
                 level=None,
                 use_tensorboard=False,
                 tensorboard_logdir=None):
        self._logger = logging.getLogger(name)
        self._level = env_level() if level is None else level
        self._logger.setLevel(self._level)
        self.use_tensorboard = use_tensorboard
        if self.use_tensorboard and tensorboard_logdir is None:
            raise ValueError('logdir is not None if you use tensorboard')
        self.summary_w = None
        if self.use_tensorboard:
            import tensorboardX
            self.summary_w = tensorboardX.SummaryWriter(log_dir=tensorboard_logdir)

    def info(self, value):
        self._logger.info(value)

    def debug(self, value):
        self._logger.debug(value)

    def warning(self, value):
        self._logger.warning(value)

    def equation(self, name, value):
        self._logger.info('{name} = {value}'.format(name=name, value=value))

    def approx_equation(self, name, value):
        self._logger.info('{name} ~= {value}'.format(name=name, value=value))

    def sweep_log(self, sweep, calls, rule_applications, num_objects, num_facts):
        self._logger.info('sweep: {}\tcalls = {}\trules = {}\tobjects = {}\tfacts = {}'.format(
            sweep, calls, rule_applications, num_objects, num_facts))

    def bench_log(self, step, row):
        """Log one bench row; numeric columns also go to tensorboard."""
        msg = ''.join(['{name} = {value}\t'.format(name=name, value=value) for name, value in row.items()])
        self._logger.info('[Bench] {}'.format(msg))
        if self.use_tensorboard:
            self.bench_summary(step, row)

    def bench_summary(self, step, row):
        for name, value in row.items():
            if isinstance(value, bool) or value is None:
                continue
            if isinstance(value, (int, float, np.integer, np.floating)):
                self.summary_w.add_scalar('bench/{}'.format(name), float(value), global_step=step)

    def close(self):
        if self.summary_w is not None:
            self.summary_w.close()


def speed(logger, sec, unit='run'):
    logger.info('[Speed] {} s/{}'.format(round(sec, 4), unit))


def run_start(logger, what):
    logger.info('Start {} at {}'.format(what, time.strftime("%Y-%m-%d %H:%M:%S", time.localtime())))


def summarize_times(times):
    """Mean / median / max of a list of wall times (seconds)."""
    if len(times) == 0:
        return dict(mean=0.0, median=0.0, max=0.0)
    arr = np.asarray(times, dtype=np.float64)
    return dict(mean=float(np.mean(arr)), median=float(np.median(arr)), max=float(np.max(arr)))
