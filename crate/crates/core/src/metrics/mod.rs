//! Full-reference PSNR and the no-reference UCIQE and UIQM scores.

mod psnr;
mod report;
mod uciqe;
mod uiqm;

pub use psnr::{mse, psnr, Psnr};
pub use report::{
    evaluate_batch, paper_table_iii, score_image, EvalItem, MethodAggregate, MethodLabel, MethodTable, QualityReport,
    QualityScores, ReportRow, MEAN_ROW, REPORT_HEADER,
};
pub use uciqe::{uciqe, UciqeComponents, UCIQE_WEIGHTS};
pub use uiqm::{eme, sobel_magnitude, uicm, uiconm, uiqm, uism, UiqmComponents, BLOCK, UIQM_WEIGHTS};
