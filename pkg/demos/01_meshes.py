# # Meshes for the benchmark domains
#
# Three domains are used: the unit hexagon, a disk, and a disk with a slit
# along the negative x-axis.  Meshes are plain arrays; topology and geometry
# are derived on demand.

import numpy as np

from wghelmholtz.mesh import (cracked_disk_mesh, disk_mesh, hexagon_mesh, mesh_size,
                              refine_uniform, validate)

# ## The hexagon
#
# Six equilateral sectors, each cut into N^2 triangles, so h = 1/N exactly.

for N in (1, 2, 4, 8):
    m = hexagon_mesh(N)
    print(f"N={N}: {m.n_triangles} triangles, {m.n_vertices} vertices, "
          f"{m.n_edges} edges, h={mesh_size(m):.4f}")

# ## Disk and cracked disk
#
# Rings of a hexagonal lattice are mapped onto the disk.  Refinement splits
# every triangle in four and pushes new boundary midpoints onto the circle.

disk = disk_mesh(5.0, 30)
print(disk, "h =", round(mesh_size(disk), 3))

crack = cracked_disk_mesh(1.0, 36)
print(crack, "h =", round(mesh_size(crack), 3))

# The slit is stored twice.  Edges on the lower face carry sheet -1 and their
# points have y = -0.0, so atan2 sees the angle -pi there.

slit = np.flatnonzero(crack.edge_sheet != 0)
print("slit edges:", len(slit), "sheets:", sorted(set(crack.edge_sheet[slit].tolist())))

# ## Checking a mesh
#
# validate() never raises; it collects every problem it finds.

for m in (disk, crack, refine_uniform(crack)):
    d = validate(m)
    print(m.n_triangles, "triangles ok:", d.ok, "Euler characteristic:", d.euler_characteristic)
