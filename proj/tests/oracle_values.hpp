#pragma once

// Generated by tests/oracles/compute.py (numpy/scipy/cvxpy). Do not edit.

#include <vector>

namespace oracle {

inline const std::vector<std::vector<double>> kPwmP = {{1.0378325013625695, 0.24865308028661293}, {0.24865308028661381, 2.865744764990403}};
inline const std::vector<std::vector<double>> kPwmH = {{1.2458679280095117, 3.1303504745241852, 0.04727218256873004}, {3.130350474524186, 42.78288775260601, 0.6548121515832906}, {0.04727218256873004, 0.6548121515832906, 0.010741724526581679}};
inline const std::vector<std::vector<double>> kPwmL = {{-4.400800118430647, -60.959685752774604}};
inline constexpr double kPwmJstar = 36.91688748058847;
inline constexpr double kPwmJseries = 36.91688748058848;
inline const std::vector<std::vector<double>> kPwmDetP = {{1.0212362299664093, 0.11982253608395199}, {0.11982253608395288, 1.6897815169633361}};
inline const std::vector<std::vector<double>> kPwmDetL = {{-4.832867662160459, -64.05753991333249}};
inline constexpr double kScalarP = 3.073405762956952;  // a=1.2 b=0.7 q=2 r=0.5 alpha=0.9
inline const std::vector<std::vector<double>> kPwmLyapOpenLoop = {{1.2886729837447348, 3.282594204326874}, {3.282594204326873, 117.23551771017695}};
inline const std::vector<std::vector<double>> kPwmLyapOpenLoopNoChannel = {{1.288385274168517, 3.286684296760832}, {3.286684296760832, 117.02850362545075}};
inline constexpr double kPwmSdpObjective = 3.903577388414494;
inline const std::vector<std::vector<double>> kLmiG0 = {{5.0, 0.0, 0.0, 0.0}, {0.0, 5.0, 0.0, 0.0}, {0.0, 0.0, 5.0, 0.0}, {0.0, 0.0, 0.0, 5.0}};
inline const std::vector<std::vector<double>> kLmiG1 = {{0.03419276725318417, 0.5308890146017573, 0.9858033474212382, 0.08503568824323932}, {0.5308890146017573, -0.5273841930334252, -0.6387992207010746, -0.09631538651122266}, {0.9858033474212382, -0.6387992207010746, 1.5665487746995206, -0.23776536361523692}, {0.08503568824323932, -0.09631538651122266, -0.23776536361523692, 0.46311015859758675}};
inline const std::vector<std::vector<double>> kLmiG2 = {{0.824513527530113, -0.5364352563203114, -1.0365633843441129, -0.4033826366268879}, {-0.5364352563203114, -1.5143835037313955, -0.20953590059791474, -0.31696399837153716}, {-1.0365633843441129, -0.20953590059791474, -0.467597558892747, -0.1479766103522568}, {-0.4033826366268879, -0.31696399837153716, -0.1479766103522568, -0.23313207796045685}};
inline const std::vector<std::vector<double>> kLmiG3 = {{-0.7435960295088448, 0.4648308083344006, 0.5324432028549466, -0.48081176442201257}, {0.4648308083344006, 1.0428754765829538, 0.020294652377261788, -0.8258412513486234}, {0.5324432028549466, 0.020294652377261788, 1.0988127684144084, -1.5092978125190983}, {-0.48081176442201257, -0.8258412513486234, -1.5092978125190983, 0.1264345551969962}};
inline const std::vector<std::vector<double>> kLmiC = {{0.527804212495524, -0.7387900314758065, 1.3856470744961586}};
inline constexpr double kLmiValue = 6.184312279909317;
inline constexpr double kPwmSmallDataObjective = 25.068707372162883;

}  // namespace oracle

