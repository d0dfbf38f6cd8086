use crate::qot::{SpanNoiseBreakdown, TransceiverSpec};

/// Dual-polarisation Shannon capacity of a span, bit/s.
pub fn span_total_capacity(breakdown: &SpanNoiseBreakdown, trx: &TransceiverSpec) -> f64 {
    (0..breakdown.n_channels())
        .map(|i| 2.0 * trx.symbol_rate_baud * breakdown.gsnr_lin(i).ln_1p() / std::f64::consts::LN_2)
        .sum()
}
