void g(int y) {
 // P(y) {y>=0}
}
void h(int z) {
 // P(z) {z#init==z}
}
int main() { g(1); h(2); }
