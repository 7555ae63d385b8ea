use wavebench_core::oracle::*;
fn main() {
    let f = ManufacturedField::pole2d(1.0, 1.0);
    for &(nr, na) in &[(24usize, 24usize), (40, 40), (64, 64), (100, 100), (140, 140), (200, 170)] {
        let res = OracleResolution { radial: nr, angular: na, azimuthal: 8 };
        let rep = green_identity_audit(&f, 100.0, &res).unwrap();
        println!("nr={nr:3} na={na:3} defect1={:.3e} defect2={:.3e}", rep.identity1_defect, rep.identity2_defect);
    }
}
