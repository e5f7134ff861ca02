"""Level curves of the completed zeta function pi^(-s/2) Gamma(s/2) zeta(s)."""

__version__ = "0.1.0"

from .zfn import (  # noqa: E402
    DEFAULT_CONFIG,
    EvalConfig,
    LogComplex,
    completed_zeta,
    euler_product_oracle,
    log_completed_zeta,
    log_gamma,
    zeta_right,
    zeta_series_oracle,
)
from .field import PhaseField, Window, sample_phase_field  # noqa: E402
from .contour import (  # noqa: E402
    Classification,
    Color,
    Curve,
    CurveSet,
    classify_green_curve,
    count_critical_line_crossings,
    curve_pair_intersections,
    extract_curve_set,
    extract_level_curves,
)
from .render import RenderStyle, render_raster, render_vector  # noqa: E402
from .verify import (  # noqa: E402
    TopologyReport,
    ZeroRecord,
    hardy_real,
    scan_zeros,
    topology_report,
    zero_count_estimate,
)
