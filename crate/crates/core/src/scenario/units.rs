//! Power unit conversions. Internally every power is in watts.

pub fn db_to_watts(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

pub fn dbm_to_watts(x_dbm: f64) -> f64 {
    10f64.powf((x_dbm - 30.0) / 10.0)
}

pub fn watts_to_db(w: f64) -> f64 {
    10.0 * w.log10()
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}
