unsigned int g;
int main() {
 g = 7u;
 // P(g) {g#init==0}
}
