"""
异常定义
"""


class PolycalcError(Exception):
    """所有计算错误的基类"""


class ParameterError(PolycalcError, ValueError):
    """参数不合法"""


class SamplingError(PolycalcError, ValueError):
    """采样得到非有限值"""


class SupportError(PolycalcError, ValueError):
    """分布的支撑不在 [0, +∞) 上"""


class CapabilityError(PolycalcError):
    """超出表示能力（例如原子导数阶数过高）"""


class BoundaryTermError(PolycalcError):
    """广义微分时密度在0点不可忽略，存在边界项"""


class GridMismatchError(PolycalcError, ValueError):
    """两个对象定义在不同的网格上"""


class ResolutionError(PolycalcError):
    """网格分辨率不足以解析振荡"""


class DomainError(PolycalcError, ValueError):
    """参数不在定义域内"""


class DegreeMismatchError(PolycalcError, ValueError):
    """多项式次数与生成元块不匹配"""


class ConfigurationError(PolycalcError):
    """配置文件错误"""


class OperatorError(PolycalcError):
    """算子在某个探针上求值失败"""
