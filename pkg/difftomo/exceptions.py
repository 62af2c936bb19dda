class DiffTomoException(Exception):
    code = None
    exit_code = 3

    def __init__(self, message='', code=None):
        if code:
            self.code = code
        self.message = message
        super().__init__(f'<{self.code}> {message}')


class ParamException(DiffTomoException):
    code = 'PARAM_ERROR'
    exit_code = 2


class ConfigException(DiffTomoException):
    code = 'CONFIG_ERROR'
    exit_code = 2


class ConverterException(DiffTomoException):
    code = 'NOT_SUPPORT'
    exit_code = 2


class SupportException(DiffTomoException):
    code = 'SUPPORT_VIOLATION'
    exit_code = 2


class DomainException(DiffTomoException):
    code = 'EVANESCENT_NODE'
    exit_code = 3


class SingularityException(DiffTomoException):
    code = 'SINGULAR'
    exit_code = 3


class BreakpointException(DiffTomoException):
    code = 'BREAKPOINT'
    exit_code = 3


class BranchTrackingException(DiffTomoException):
    code = 'BRANCH_TRACKING'
    exit_code = 3


class IndicatrixException(DiffTomoException):
    code = 'INDICATRIX'
    exit_code = 3


class NumericalCheckException(DiffTomoException):
    code = 'CHECK_FAILED'
    exit_code = 3


class NbinException(DiffTomoException):
    code = 'NBIN_FORMAT'
    exit_code = 4


class StorageException(DiffTomoException):
    code = 'IO_ERROR'
    exit_code = 4


class InternalException(DiffTomoException):
    code = 'INTERNAL_ERROR'
    exit_code = 3


class ConvergenceWarning(UserWarning):
    pass


EXCEPTIONS = {
    ParamException.code: ParamException,
    ConfigException.code: ConfigException,
    ConverterException.code: ConverterException,
    SupportException.code: SupportException,
    DomainException.code: DomainException,
    SingularityException.code: SingularityException,
    BreakpointException.code: BreakpointException,
    BranchTrackingException.code: BranchTrackingException,
    IndicatrixException.code: IndicatrixException,
    NumericalCheckException.code: NumericalCheckException,
    NbinException.code: NbinException,
    StorageException.code: StorageException,
    InternalException.code: InternalException
}


def exit_code_for(code):
    """Map a response code to the process exit code."""
    if code == 'OK':
        return 0
    return EXCEPTIONS.get(code, DiffTomoException).exit_code
