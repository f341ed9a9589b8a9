from datetime import datetime, timezone
import logging
import math
import os

import numpy as np
import pytz

logger = logging.getLogger("mengerknot")


class MengerError(Exception):
    """Base class of every error raised by mengerknot."""


class DomainError(MengerError, ValueError):
    """An operation was called outside its precondition (bad exponent, repeated points, ...)."""


class CurveConstructionError(DomainError):
    """A polygonal loop could not be built from the given vertices."""


class CurveFileError(MengerError):
    """A curve file could not be read or does not follow the curve file format."""


class Utilities:
    """
    A class of helper utilities to reduce replication of code across the mengerknot modules.
    """

    @staticmethod
    def as_point(value, name='point'):
        """
        Converts a coordinate triple into a float array of shape (3,).

        Parameters
        ----------
        value : sequence of float
                The x, y, z coordinates.
        name  : str
                Name used in the error message.

        Returns
        -------
        point : numpy.ndarray
                The point as a finite float64 array.

        Raises
        ------
        DomainError
            If the value is not a triple of finite reals.
        """
        point = np.asarray(value, dtype=np.float64)
        if point.shape != (3,):
            raise DomainError('{} must have exactly 3 coordinates, got shape {}'.format(name, point.shape))
        if not np.all(np.isfinite(point)):
            raise DomainError('{} has non-finite coordinates: {}'.format(name, point.tolist()))
        return point

    @staticmethod
    def combine_partials(partials):
        """
        Combines per-block compensated partial sums into one value.

        The kernels return one (sum, compensation) row per fixed block of outer indices; the rows
        are always combined in block order with an exactly rounded sum, so the result does not
        depend on which worker produced which block.

        Parameters
        ----------
        partials : numpy.ndarray
                   Array of shape (n_blocks, 2).

        Returns
        -------
        total : float
        """
        return math.fsum(np.asarray(partials, dtype=np.float64).ravel().tolist())

    @staticmethod
    def worker_count(requested=None):
        """
        Resolves the worker count for the compiled kernels.

        Order of precedence: the explicit argument, then the MENGER_WORKERS environment variable
        (usually set in .env), then numba's configured thread pool size. Values larger than the
        pool are clamped to it.

        Parameters
        ----------
        requested : int, optional
                    Worker count given on the command line or by the caller.

        Returns
        -------
        workers : int
        """
        from numba import config as numba_config

        pool = max(1, int(numba_config.NUMBA_NUM_THREADS))
        if requested is None:
            env_value = os.getenv('MENGER_WORKERS')
            if env_value not in (None, ''):
                try:
                    requested = int(env_value)
                except ValueError:
                    raise DomainError('MENGER_WORKERS must be an integer, got "{}"'.format(env_value))
        if requested is None:
            return pool
        if requested < 1:
            raise DomainError('worker count must be at least 1, got {}'.format(requested))
        if requested > pool:
            logger.info('requested %d workers, numba pool has %d; clamping', requested, pool)
        return min(int(requested), pool)

    @staticmethod
    def report_timezone():
        """The report time zone name: MENGER_TZ when set, else UTC."""
        return os.getenv('MENGER_TZ') or 'UTC'

    @staticmethod
    def run_timestamp(tz_name=None):
        """
        Returns the current time as a string in the configured report time zone.

        Parameters
        ----------
        tz_name : str, optional
                  A time zone name known to pytz, such as 'UTC' or 'Europe/Berlin'.
                  Defaults to MENGER_TZ, then UTC.

        Returns
        -------
        stamp : str
                Formatted as '%Y-%m-%d %H:%M:%S'.

        Raises
        ------
        DomainError
            If the name is not a pytz time zone.
        """
        tz_name = tz_name or Utilities.report_timezone()
        try:
            zone = pytz.timezone(tz_name)
        except pytz.UnknownTimeZoneError:
            raise DomainError('unknown time zone "{}"; use UTC or a name such as Europe/Berlin'.format(tz_name))
        return datetime.now(timezone.utc).astimezone(zone).strftime('%Y-%m-%d %H:%M:%S')

    @staticmethod
    def report_metadata(tool, status='GOOD', error_msg=''):
        """
        Builds the metadata header placed at the top of every JSON report.

        Parameters
        ----------
        tool      : str
                    The subcommand or routine that produced the report.
        status    : str
                    GOOD or ERROR.
        error_msg : str
                    Empty for successful runs.

        Returns
        -------
        metadata : dict
        """
        from . import __version__

        tz_name = Utilities.report_timezone()
        return {
            'tool': tool,
            'mengerknot_version': __version__,
            'timezone': tz_name,
            'run_time': Utilities.run_timestamp(tz_name),
            'status': status,
            'error_msg': error_msg
        }

    @staticmethod
    def create_error_response(tool, params, error_msg):
        """
        Create an error response that will get placed in the resp_raw field of a wrapper.

        Instead of throwing an exception to the caller, the wrapper layer calls this method to build
        a response that looks like a successful one, with status ERROR and the message attached.

        Parameters
        ----------
        tool      : str
                    The energy or routine that failed.
        params    : dict
                    The parameters that were passed in.
        error_msg : str
                    The error message.

        Returns
        -------
        response : dict
        """
        response = Utilities.report_metadata(tool, status='ERROR', error_msg='Bad Request: ' + error_msg)
        response['params'] = {k: v for k, v in params.items() if isinstance(v, (str, int, float, bool, type(None)))}
        response['output'] = []
        return response

    @staticmethod
    def check_empty_str(input_param: dict):
        """
        Raises an exception if any of the parameters are submitted with an empty string.

        Parameters
        ----------
        input_param : dict
                      A dictionary of parameters.
        """
        for k, v in input_param.items():
            if v == '':
                raise DomainError("{} parameter submitted with Empty String value".format(k))

    @staticmethod
    def format_real(value):
        """Formats a real with 17 significant digits ('inf' for +∞)."""
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return format(float(value), '.17g')

    @staticmethod
    def json_safe(document):
        """
        Copy of a report document that strict JSON can hold.

        Non-finite reals become the strings of :meth:`format_real` ('inf', '-inf', 'nan') and
        numpy scalars become Python numbers, so the result can be dumped with allow_nan=False.

        Parameters
        ----------
        document : dict, list or scalar

        Returns
        -------
        document : dict, list or scalar
        """
        if isinstance(document, dict):
            return {k: Utilities.json_safe(v) for k, v in document.items()}
        if isinstance(document, (list, tuple)):
            return [Utilities.json_safe(v) for v in document]
        if isinstance(document, np.generic):
            document = document.item()
        if isinstance(document, float) and not math.isfinite(document):
            return Utilities.format_real(document)
        return document

    @staticmethod
    def parse_real_list(text, name='list'):
        """
        Parses a comma separated list of reals such as '1,2,3.5'.

        Raises
        ------
        DomainError
            If an entry is not a number.
        """
        try:
            values = [float(item) for item in str(text).split(',') if item.strip() != '']
        except ValueError:
            raise DomainError('{} must be a comma separated list of numbers, got "{}"'.format(name, text))
        if not values:
            raise DomainError('{} must not be empty'.format(name))
        return values

    @staticmethod
    def parse_int_list(text, name='list'):
        """Parses a comma separated list of integers such as '64,128,256'."""
        try:
            values = [int(item) for item in str(text).split(',') if item.strip() != '']
        except ValueError:
            raise DomainError('{} must be a comma separated list of integers, got "{}"'.format(name, text))
        if not values:
            raise DomainError('{} must not be empty'.format(name))
        return values
