from . import __version__
from .curve import PolygonalLoop, read_curve
from .energies import EnergyParam, evaluate, set_workers
from .utilities import MengerError, Utilities


class EnergyWrapper:
    """
    This class is a wrapper for all the energy evaluations that make up mengerknot.
    """
    def __init__(self, params: dict):
        """
        This module initializes an EnergyWrapper object.

        Parameters
        ----------
        params : dict
                 The energy name under 'name', its exponent under 'p', the loop under 'loop'
                 (a PolygonalLoop) or 'path' (a curve file), and optionally 'workers'.
        """
        self.name = params.get('name', None)
        self.params = params
        self.report = None
        self.resp_raw = None

    def get_energy(self):
        """
        This module will do the following:
        1) Create the EnergyParam object and check it.
        2) Checks to make sure that no entry in the parameter dictionary is the empty string.
        3) Load the loop from the parameters or from the curve file.
        4) Set the worker count and evaluate the energy.
        5) Build resp_raw, the metadata block with the report attached.

        If anything raises a mengerknot error, resp_raw is an error response with status ERROR
        instead, and report stays None.
        """
        try:
            eparam = EnergyParam(name=self.name, p=self.params.get('p', None),
                                 workers=self.params.get('workers', None))
            Utilities.check_empty_str(self.params)
            eparam._process()
            loop = self.params.get('loop', None)
            if loop is None:
                if self.params.get('path', None) is None:
                    raise MengerError('either "loop" or "path" must be given')
                loop = read_curve(self.params['path'])
            elif not isinstance(loop, PolygonalLoop):
                loop = PolygonalLoop(loop)
            set_workers(eparam.workers)
            self.report = evaluate(loop, eparam.name, eparam.p)
            self.resp_raw = Utilities.report_metadata(eparam.name)
            self.resp_raw['output'] = [self.report.to_dict()]
        except MengerError as error:
            self.report = None
            self.resp_raw = Utilities.create_error_response(str(self.name), self.params, str(error))
        return self

    @property
    def ok(self) -> bool:
        return self.resp_raw is not None and self.resp_raw['status'] == 'GOOD'


def get_energy(name: str, **params) -> EnergyWrapper:
    """
    This method will evaluate one energy on a loop.

    Returns
    -------
    The wrapper, with the report in .report and the response document in .resp_raw.
    """
    params['name'] = name
    return EnergyWrapper(params).get_energy()


def get_version() -> str:
    """
    This module returns the version number of the mengerknot package.

    Returns
    -------
    The package version.
    """
    return __version__
