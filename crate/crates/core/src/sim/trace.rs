use std::io::Write;

use crate::error::Result;

use super::dynamic::DynamicSample;
use super::kinematic::KinematicSample;

pub const DYNAMIC_HEADER: &str = "t,x,y,theta,vx,vy,omega,fx,fy,tau,fn";
pub const KINEMATIC_HEADER: &str = "t,v_x,v_y,omega,f_x,f_y,tau";

fn write_row<W: Write>(out: &mut W, vals: &[f64]) -> std::io::Result<()> {
    for (i, v) in vals.iter().enumerate() {
        if i > 0 {
            out.write_all(b",")?;
        }
        write!(out, "{v:.16e}")?;
    }
    out.write_all(b"\n")
}

/// Writes a rigid-body trace with 17 significant digits per value.
pub fn write_dynamic_csv<W: Write>(rows: &[DynamicSample], mut out: W) -> Result<()> {
    writeln!(out, "{DYNAMIC_HEADER}")?;
    for r in rows {
        let f = &r.friction;
        write_row(
            &mut out,
            &[r.t, r.pose[0], r.pose[1], r.pose[2], r.twist.v_x, r.twist.v_y, r.twist.omega, f.f_x, f.f_y, f.tau, r.f_n],
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_kinematic_csv<W: Write>(rows: &[KinematicSample], mut out: W) -> Result<()> {
    writeln!(out, "{KINEMATIC_HEADER}")?;
    for r in rows {
        let (v, f) = (&r.twist, &r.wrench);
        write_row(&mut out, &[r.t, v.v_x, v.v_y, v.omega, f.f_x, f.f_y, f.tau])?;
    }
    out.flush()?;
    Ok(())
}
