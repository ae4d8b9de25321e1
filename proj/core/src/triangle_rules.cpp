// Symmetric triangle quadrature rules of Witherden & Vincent, converted from
// the biunit reference triangle to the unit triangle (0,0), (1,0), (0,1).
// Source tables: PyFR 2.1, pyfr/quadrules/tri/witherden-vincent-*-sp.txt
//
// Copyright (c) 2012-2022 Imperial College London. All rights reserved.
// Distributed under the BSD-3-Clause license of PyFR; see
// core/src/LICENSE.pyfr for the full text.

#include "triangle_rules.hpp"

namespace aqnn::detail {
namespace {

constexpr TriangleNode kDegree1[] = {
    {0.33333333333333337, 0.33333333333333337, 0.5},
};

constexpr TriangleNode kDegree2[] = {
    {0.16666666666666669, 0.66666666666666663, 0.16666666666666666},
    {0.66666666666666663, 0.16666666666666669, 0.16666666666666666},
    {0.16666666666666669, 0.16666666666666669, 0.16666666666666666},
};

constexpr TriangleNode kDegree4[] = {
    {0.44594849091596489, 0.10810301816807022, 0.11169079483900574},
    {0.10810301816807022, 0.44594849091596489, 0.11169079483900574},
    {0.44594849091596489, 0.44594849091596489, 0.11169079483900574},
    {0.091576213509770743, 0.81684757298045851, 0.054975871827660935},
    {0.81684757298045851, 0.091576213509770743, 0.054975871827660935},
    {0.091576213509770743, 0.091576213509770743, 0.054975871827660935},
};

constexpr TriangleNode kDegree5[] = {
    {0.33333333333333337, 0.33333333333333337, 0.1125},
    {0.10128650732345634, 0.79742698535308731, 0.06296959027241357},
    {0.79742698535308731, 0.10128650732345634, 0.06296959027241357},
    {0.10128650732345634, 0.10128650732345634, 0.06296959027241357},
    {0.47014206410511511, 0.059715871789769837, 0.066197076394253096},
    {0.059715871789769837, 0.47014206410511511, 0.066197076394253096},
    {0.47014206410511511, 0.47014206410511511, 0.066197076394253096},
};

constexpr TriangleNode kDegree6[] = {
    {0.063089014491502227, 0.87382197101699555, 0.025422453185103409},
    {0.87382197101699555, 0.063089014491502227, 0.025422453185103409},
    {0.063089014491502227, 0.063089014491502227, 0.025422453185103409},
    {0.24928674517091043, 0.50142650965817914, 0.058393137863189684},
    {0.50142650965817914, 0.24928674517091043, 0.058393137863189684},
    {0.24928674517091043, 0.24928674517091043, 0.058393137863189684},
    {0.053145049844816938, 0.63650249912139867, 0.041425537809186785},
    {0.63650249912139867, 0.053145049844816938, 0.041425537809186785},
    {0.31035245103378439, 0.63650249912139867, 0.041425537809186785},
    {0.63650249912139867, 0.31035245103378439, 0.041425537809186785},
    {0.31035245103378439, 0.053145049844816938, 0.041425537809186785},
    {0.053145049844816938, 0.31035245103378439, 0.041425537809186785},
};

constexpr TriangleNode kDegree7[] = {
    {0.03373064855458785, 0.9325387028908243, 0.0082725250553960655},
    {0.9325387028908243, 0.03373064855458785, 0.0082725250553960655},
    {0.03373064855458785, 0.03373064855458785, 0.0082725250553960655},
    {0.24157738259540357, 0.51684523480919287, 0.063972085615077792},
    {0.51684523480919287, 0.24157738259540357, 0.063972085615077792},
    {0.24157738259540357, 0.24157738259540357, 0.063972085615077792},
    {0.47430969250471822, 0.051380614990563511, 0.038543323092993034},
    {0.051380614990563511, 0.47430969250471822, 0.038543323092993034},
    {0.47430969250471822, 0.47430969250471822, 0.038543323092993034},
    {0.047036644652595216, 0.75428004055005315, 0.02793936645159989},
    {0.75428004055005315, 0.047036644652595216, 0.02793936645159989},
    {0.19868331479735157, 0.75428004055005315, 0.02793936645159989},
    {0.75428004055005315, 0.19868331479735157, 0.02793936645159989},
    {0.19868331479735157, 0.047036644652595216, 0.02793936645159989},
    {0.047036644652595216, 0.19868331479735157, 0.02793936645159989},
};

constexpr TriangleNode kDegree8[] = {
    {0.33333333333333337, 0.33333333333333337, 0.072157803838893586},
    {0.45929258829272313, 0.081414823414553694, 0.04754581713364231},
    {0.081414823414553694, 0.45929258829272313, 0.04754581713364231},
    {0.45929258829272313, 0.45929258829272313, 0.04754581713364231},
    {0.17056930775176021, 0.65886138449647957, 0.051608685267359122},
    {0.65886138449647957, 0.17056930775176021, 0.051608685267359122},
    {0.17056930775176021, 0.17056930775176021, 0.051608685267359122},
    {0.050547228317030957, 0.89890554336593809, 0.01622924881159904},
    {0.89890554336593809, 0.050547228317030957, 0.01622924881159904},
    {0.050547228317030957, 0.050547228317030957, 0.01622924881159904},
    {0.0083947774099575878, 0.72849239295540424, 0.013615157087217496},
    {0.72849239295540424, 0.0083947774099575878, 0.013615157087217496},
    {0.26311282963463811, 0.72849239295540424, 0.013615157087217496},
    {0.72849239295540424, 0.26311282963463811, 0.013615157087217496},
    {0.26311282963463811, 0.0083947774099575878, 0.013615157087217496},
    {0.0083947774099575878, 0.26311282963463811, 0.013615157087217496},
};

constexpr TriangleNode kDegree9[] = {
    {0.33333333333333337, 0.33333333333333337, 0.048567898141399418},
    {0.43708959149293664, 0.12582081701412673, 0.038913770502387139},
    {0.12582081701412673, 0.43708959149293664, 0.038913770502387139},
    {0.43708959149293664, 0.43708959149293664, 0.038913770502387139},
    {0.18820353561903275, 0.62359292876193451, 0.039823869463605124},
    {0.62359292876193451, 0.18820353561903275, 0.039823869463605124},
    {0.18820353561903275, 0.18820353561903275, 0.039823869463605124},
    {0.48968251919873762, 0.02063496160252476, 0.015667350113569536},
    {0.02063496160252476, 0.48968251919873762, 0.015667350113569536},
    {0.48968251919873762, 0.48968251919873762, 0.015667350113569536},
    {0.044729513394452691, 0.91054097321109451, 0.012788837829349016},
    {0.91054097321109451, 0.044729513394452691, 0.012788837829349016},
    {0.044729513394452691, 0.044729513394452691, 0.012788837829349016},
    {0.036838412054736258, 0.74119859878449801, 0.021641769688644688},
    {0.74119859878449801, 0.036838412054736258, 0.021641769688644688},
    {0.22196298916076568, 0.74119859878449801, 0.021641769688644688},
    {0.74119859878449801, 0.22196298916076568, 0.021641769688644688},
    {0.22196298916076568, 0.036838412054736258, 0.021641769688644688},
    {0.036838412054736258, 0.22196298916076568, 0.021641769688644688},
};

constexpr TriangleNode kDegree10[] = {
    {0.33333333333333337, 0.33333333333333337, 0.040871664573142986},
    {0.032055373216943517, 0.93588925356611297, 0.0066764844065747833},
    {0.93588925356611297, 0.032055373216943517, 0.0066764844065747833},
    {0.032055373216943517, 0.032055373216943517, 0.0066764844065747833},
    {0.14216110105656438, 0.71567779788687125, 0.022978981802372365},
    {0.71567779788687125, 0.14216110105656438, 0.022978981802372365},
    {0.14216110105656438, 0.14216110105656438, 0.022978981802372365},
    {0.32181299528883545, 0.530054118927344, 0.031952453198212022},
    {0.530054118927344, 0.32181299528883545, 0.031952453198212022},
    {0.14813288578382056, 0.530054118927344, 0.031952453198212022},
    {0.530054118927344, 0.14813288578382056, 0.031952453198212022},
    {0.14813288578382056, 0.32181299528883545, 0.031952453198212022},
    {0.32181299528883545, 0.14813288578382056, 0.031952453198212022},
    {0.029619889488729789, 0.60123332868345924, 0.017092324081479714},
    {0.60123332868345924, 0.029619889488729789, 0.017092324081479714},
    {0.36914678182781102, 0.60123332868345924, 0.017092324081479714},
    {0.60123332868345924, 0.36914678182781102, 0.017092324081479714},
    {0.36914678182781102, 0.029619889488729789, 0.017092324081479714},
    {0.029619889488729789, 0.36914678182781102, 0.017092324081479714},
    {0.028367665339938453, 0.80793060092287905, 0.012648878853644192},
    {0.80793060092287905, 0.028367665339938453, 0.012648878853644192},
    {0.1637017337371825, 0.80793060092287905, 0.012648878853644192},
    {0.80793060092287905, 0.1637017337371825, 0.012648878853644192},
    {0.1637017337371825, 0.028367665339938453, 0.012648878853644192},
    {0.028367665339938453, 0.1637017337371825, 0.012648878853644192},
};

}  // namespace

// Smallest tabulated rule whose degree of exactness is at least `degree`.
std::span<const TriangleNode> witherden_vincent_triangle(int degree) {
  switch (degree) {
    case 1: return kDegree1;
    case 2: return kDegree2;
    case 3: return kDegree4;
    case 4: return kDegree4;
    case 5: return kDegree5;
    case 6: return kDegree6;
    case 7: return kDegree7;
    case 8: return kDegree8;
    case 9: return kDegree9;
    case 10: return kDegree10;
    default: return {};
  }
}

}  // namespace aqnn::detail
