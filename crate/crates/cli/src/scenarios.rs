//! Bundled scenarios reproducing the reference figures.

/// `(name, JSON text)` pairs, figures first.
pub const CATALOG: &[(&str, &str)] = &[
    ("fig2a", include_str!("../scenarios/fig2a.json")),
    ("fig2b", include_str!("../scenarios/fig2b.json")),
    ("fig2c", include_str!("../scenarios/fig2c.json")),
    ("fig2d", include_str!("../scenarios/fig2d.json")),
    ("fig3a", include_str!("../scenarios/fig3a.json")),
    ("fig3b", include_str!("../scenarios/fig3b.json")),
    ("fig3c", include_str!("../scenarios/fig3c.json")),
    ("fig3d", include_str!("../scenarios/fig3d.json")),
    ("fig4a", include_str!("../scenarios/fig4a.json")),
    ("fig4b", include_str!("../scenarios/fig4b.json")),
    ("fig4c", include_str!("../scenarios/fig4c.json")),
    ("fig4d", include_str!("../scenarios/fig4d.json")),
    ("fig5", include_str!("../scenarios/fig5.json")),
    ("fig6", include_str!("../scenarios/fig6.json")),
    ("fig7", include_str!("../scenarios/fig7.json")),
    ("appE-d-sigma0p01um-strong", include_str!("../scenarios/appE-d-sigma0p01um-strong.json")),
    ("appE-d-sigma0p01um-weak", include_str!("../scenarios/appE-d-sigma0p01um-weak.json")),
    ("appE-d-sigma1um-strong", include_str!("../scenarios/appE-d-sigma1um-strong.json")),
    ("appE-d-sigma1um-weak", include_str!("../scenarios/appE-d-sigma1um-weak.json")),
    ("appE-lc-follow-sigma1nm-strong", include_str!("../scenarios/appE-lc-follow-sigma1nm-strong.json")),
    ("appE-lc-follow-sigma1nm-weak", include_str!("../scenarios/appE-lc-follow-sigma1nm-weak.json")),
    ("appE-lc-follow-sigma5nm-strong", include_str!("../scenarios/appE-lc-follow-sigma5nm-strong.json")),
    ("appE-lc-follow-sigma5nm-weak", include_str!("../scenarios/appE-lc-follow-sigma5nm-weak.json")),
    ("appE-lc-sigma1nm-strong", include_str!("../scenarios/appE-lc-sigma1nm-strong.json")),
    ("appE-lc-sigma1nm-weak", include_str!("../scenarios/appE-lc-sigma1nm-weak.json")),
    ("appE-lc-sigma5nm-strong", include_str!("../scenarios/appE-lc-sigma5nm-strong.json")),
    ("appE-lc-sigma5nm-weak", include_str!("../scenarios/appE-lc-sigma5nm-weak.json")),
    ("appE-mitigation", include_str!("../scenarios/appE-mitigation.json")),
    ("appE-qc-sigma125-strong", include_str!("../scenarios/appE-qc-sigma125-strong.json")),
    ("appE-qc-sigma125-weak", include_str!("../scenarios/appE-qc-sigma125-weak.json")),
    ("appE-qc-sigma50-strong", include_str!("../scenarios/appE-qc-sigma50-strong.json")),
    ("appE-qc-sigma50-weak", include_str!("../scenarios/appE-qc-sigma50-weak.json")),
];

pub fn find(name: &str) -> Option<&'static str> {
    CATALOG.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}
