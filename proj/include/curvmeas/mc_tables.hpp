#pragma once

namespace curvmeas {

// Standard marching-cubes lookup tables (Bourke layout):
// vertex 0..7 = (x,y,z),(x+1,y,z),(x+1,y+1,z),(x,y+1,z) then the z+1 layer;
// edges 0..11 connect them in the usual order.
extern const int kMcEdgeTable[256];
extern const int kMcTriTable[256][16];

}  // namespace curvmeas
