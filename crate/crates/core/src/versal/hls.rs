//! HLS pragma emission for a chosen buffer mapping.

use std::fmt::Write;

use super::memory::{Buffer, Resource};
use super::VersalDesign;

fn storage_type(buffer: Buffer) -> &'static str {
    // C accumulates every cycle: one read and one write port.
    match buffer {
        Buffer::C => "ram_s2p",
        Buffer::A | Buffer::B => "ram_1p",
    }
}

fn impl_name(resource: Resource) -> &'static str {
    match resource {
        Resource::Bram => "bram",
        Resource::Uram => "uram",
    }
}

/// Array-partition and storage-binding pragmas for the A, B and C buffers,
/// in that order.
pub fn emit_hls_directives(design: &VersalDesign) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "// {} mapping {} native {} compute {}",
        design.label(),
        design.mapping,
        design.native_dims,
        design.compute_dims
    );
    for buffer in Buffer::ALL {
        let var = format!("buf_{}", buffer.name().to_ascii_lowercase());
        let _ = writeln!(
            out,
            "#pragma HLS array_partition variable={var} type=block factor={} dim=1",
            design.geometry.part(buffer)
        );
        let _ = writeln!(
            out,
            "#pragma HLS bind_storage variable={var} type={} impl={}",
            storage_type(buffer),
            impl_name(design.mapping.get(buffer))
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::versal::{p1, p2, Mapping};

    #[test]
    fn binding_follows_mapping() {
        let d = VersalDesign::new(&p1(), 2, 2, 8, Mapping::parse_compact("BUU").unwrap()).unwrap();
        let text = emit_hls_directives(&d);
        assert!(text.contains("variable=buf_a type=ram_1p impl=bram"));
        assert!(text.contains("variable=buf_b type=ram_1p impl=uram"));
        assert!(text.contains("variable=buf_c type=ram_s2p impl=uram"));
        assert!(text.contains("variable=buf_a type=block factor=104"));

        let d = VersalDesign::new(&p2(), 4, 2, 4, Mapping::parse_compact("BBU").unwrap()).unwrap();
        let text = emit_hls_directives(&d);
        assert!(text.contains("buf_a type=ram_1p impl=bram"));
        assert!(text.contains("buf_b type=ram_1p impl=bram"));
        assert!(text.contains("buf_c type=ram_s2p impl=uram"));
    }

    #[test]
    fn lines_are_ordered_a_b_c() {
        let d = VersalDesign::new(&p1(), 2, 2, 8, Mapping::parse_compact("BUU").unwrap()).unwrap();
        let text = emit_hls_directives(&d);
        let pa = text.find("buf_a").unwrap();
        let pb = text.find("buf_b").unwrap();
        let pc = text.find("buf_c").unwrap();
        assert!(pa < pb && pb < pc);
        assert_eq!(text.lines().count(), 7);
    }
}
